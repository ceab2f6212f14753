#pragma once

#include <cstdint>
#include <vector>

#include "rasc/channel.hpp"
#include "rasc/code.hpp"
#include "rasc/decode_bp.hpp"
#include "rasc/decode_ems.hpp"

namespace rasc {

enum class DecoderKind { kFullBp, kFftBp, kEms };

struct SimConfig {
  CodeConfig code;
  std::vector<double> snr_db_list;
  DecoderKind decoder = DecoderKind::kFftBp;
  EmsConfig ems;  // used by kEms only
  int max_frames = 1000;
  int target_errors = 100;  // info-symbol errors; 0 disables early stop
  int max_iters = 100;
  uint64_t seed = 0;
};

struct SimPoint {
  double snr_db = 0.0;
  long frames = 0;
  long symbol_errors = 0;
  long frame_errors = 0;
  double ser = 0.0;
  double fer = 0.0;
  double avg_iters = 0.0;
};

// Per SNR point: encode random frames, add noise, decode, count info-symbol
// and frame errors; stops at the frame budget or once target_errors symbol
// errors are seen. Frame streams are derived from (seed, point, frame), so
// results do not depend on execution order.
std::vector<SimPoint> simulate(const SimConfig& cfg);

}  // namespace rasc
