#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rasc/channel.hpp"
#include "rasc/code.hpp"
#include "rasc/decode_bp.hpp"

namespace rasc {

// Code parameters that matter to density evolution; block length does not.
struct DeCode {
  RingParams ring;
  int repeats = 2;  // q
  FilterIndex filter;
  InputConstraint constraint = InputConstraint::kQam;
};

struct McdeConfig {
  int pool_size = 5000;         // message samples per pool
  int max_iters = 100;
  double err_threshold = 1e-4;  // success when pool error estimate drops below
  double sigma_tol = 1e-5;      // bisection stop width
  int num_runs = 10;            // independent repetitions, mean reported
  double sigma_lo = 0.0;        // 0 = automatic bracket from the Shannon sigma
  double sigma_hi = 0.0;
  uint64_t seed = 1;
  CheckMethod method = CheckMethod::kFft;
};

struct McdeOutcome {
  bool converged = false;
  double final_pe = 1.0;
  int iterations = 0;
};

// One density-evolution run at fixed noise level sigma (total complex
// variance sigma^2). Maintains pools of message samples: info-to-check (Q^I),
// parity-to-check (Q^P), check-to-info (R^I), check-to-parity (R^P). Because
// every parity variable sits on the accumulator chain with one weight-1 edge
// and one weight-g edge, the Q^P and R^P pools are kept as directional pairs
// (messages sent along weight-1 edges and along weight-g edges evolve as two
// distinct stationary populations; merging them stalls the evolution well
// above the true threshold). Each iteration refreshes the R pools from the
// current Q pools, estimates the info-symbol error probability from fresh
// R^I draws, then refreshes the Q pools (fresh delabeled channel LLRs enter
// through Q^P). Success means the error estimate fell below
// cfg.err_threshold within cfg.max_iters.
McdeOutcome mcde_converges(const DeCode& code, double sigma,
                           const McdeConfig& cfg, uint64_t run_tag = 0);

struct ThresholdResult {
  std::vector<double> sigma_runs;
  double sigma_mean = 0.0;
  double snr_db_mean = 0.0;
  double rate = 0.0;  // nominal unterminated rate, bpcu
  double shannon_limit_snr_db = 0.0;
  double shannon_gap_db = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  // bisection probes per run: (sigma, converged)
  std::vector<std::vector<std::pair<double, bool>>> traces;
};

// Bisection on sigma between a converging low end and a failing high end
// (auto-expanded when the initial bracket does not straddle), repeated
// num_runs times with independent streams.
ThresholdResult threshold_search(const DeCode& code, const McdeConfig& cfg);

struct FilterRank {
  int32_t fb = 0;
  std::string taps;
  int32_t class_rep = 0;  // canonical affine-class representative
  double sigma = 0.0;
  double threshold_snr_db = 0.0;
  double shannon_gap_db = 0.0;
};

// Threshold ranking of every bijective filter, ascending by threshold SNR.
// With collapse_affine, one threshold search runs per affine class and the
// result is shared by all members (rotations and conjugations of a filter
// relabel the constellation isometrically, so their thresholds coincide).
std::vector<FilterRank> filter_search(const DeCode& base, const McdeConfig& cfg,
                                      bool collapse_affine);

// Orbit of g under multiplication by units {1, j, -1, -j} and coefficient
// conjugation; canonical representative = minimum index. Orbit size divides 8.
std::vector<int32_t> affine_orbit(FilterIndex g, const RingParams& p);
FilterIndex affine_class(FilterIndex g, const RingParams& p);

}  // namespace rasc
