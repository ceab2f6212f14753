#pragma once

#include <utility>
#include <vector>

#include "rasc/decode_bp.hpp"

namespace rasc {

// Truncated message: the list_size largest LLRs with their symbol labels,
// sorted descending; every absent symbol is approximated by gamma.
struct TruncMsg {
  std::vector<double> values;    // descending
  std::vector<int32_t> symbols;  // distinct ring indices, aligned with values
  double gamma = kNegInf;

  int size() const { return int(values.size()); }
};

struct EmsConfig {
  int list_size = 0;  // N_m
  double eta = std::numeric_limits<double>::quiet_NaN();
};

// Fills in the default offset for the known list sizes
// (20 -> -3.0, 40 -> -3.5, 64 -> -4.7, 128 -> -5.5); any other list size
// requires an explicit eta.
EmsConfig resolve_ems_config(int list_size, double eta, const RingParams& p);

// Keeps the largest list_size finite entries;
// gamma = values.back() - log(Q - kept) - eta (-inf when nothing is absent).
TruncMsg truncate(const LlrVector& v, const EmsConfig& cfg, const RingParams& p);

// Variable-node elementary step over two truncated messages: 2*N_m
// candidates (r1's symbols matched against r2, then r1.gamma + r2's
// entries), duplicate symbols keep the larger value, sorted, top N_m kept.
TruncMsg vn_elementary(const TruncMsg& r1, const TruncMsg& r2,
                       const EmsConfig& cfg, const RingParams& p);

// Hidden-node restriction: only QAM-labeled entries survive; the
// compensation constant becomes gamma' = T[m-1] - log(Q - m) - eta with m
// the number of survivors.
TruncMsg vn_hidden_ems(const TruncMsg& t, const EmsConfig& cfg,
                       const RingParams& p);

// Check-node elementary step: lazy best-first search over the virtual
// matrix q1.values[k'] + q2.values[k''], seeded with column 0; extracted
// cells whose output label (solving w1*b1 + w2*b2 + target*b_out = 0) is
// already listed are skipped and their right neighbor pushed; stops after
// N_m outputs or 2*N_m extractions and pads from the sorter in extraction
// order.
TruncMsg cn_elementary(const TruncMsg& q1, const WeightPerm& w1,
                       const TruncMsg& q2, const WeightPerm& w2,
                       const WeightPerm& target, const EmsConfig& cfg,
                       const GroupTables& tables, const EmsConfig& out_cfg);

TruncMsg cn_elementary(const TruncMsg& q1, const TruncMsg& q2,
                       FilterIndex w1, FilterIndex w2, FilterIndex target,
                       const EmsConfig& cfg, const RingParams& p);

// Degree-2 check: pure relabeling of the single incoming message.
TruncMsg ems_passthrough(const TruncMsg& m, const WeightPerm& w,
                         const WeightPerm& target, const EmsConfig& cfg,
                         const GroupTables& tables);

// Flooding decoder with truncated messages on every edge. Iteration 1 uses
// the truncated channel LLRs at parity nodes and a flat QAM prior at info
// nodes.
std::pair<std::vector<int32_t>, DecodeDiagnostics> ems_decode(
    const std::vector<LlrVector>& parity_llrs, const ParityGraph& graph,
    const EmsConfig& cfg, int max_iters);

}  // namespace rasc
