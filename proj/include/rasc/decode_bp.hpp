#pragma once

#include <utility>
#include <vector>

#include "rasc/code.hpp"
#include "rasc/llr.hpp"
#include "rasc/ring.hpp"

namespace rasc {

enum class CheckMethod { kFull, kFft };

struct DecodeDiagnostics {
  int iterations = 0;
  bool parity_ok = false;
  std::vector<int> symbol_changes;  // tentative-decision flips per iteration
};

// Index relabeling x -> g*x used inside check updates.
struct WeightPerm {
  std::vector<int32_t> fwd, inv;
  bool identity = false;
};
WeightPerm make_weight_perm(FilterIndex g, const RingParams& p);

// Unnormalized Walsh-Hadamard transform over (Z_2)^dim; applying it twice
// multiplies by the length.
void wht(Eigen::ArrayXd& a);
// Per-digit length-4 DFTs over (Z_4)^dim; inverse uses conjugate twiddles
// and carries the 1/length scale.
void dft4(Eigen::ArrayXcd& a, bool inverse);

// Variable-node rule: entrywise f + sum(incoming), QAM restriction for
// hidden nodes (entries outside the QAM subset forced to -inf), then
// max-normalization. Hidden nodes pass f = 0.
LlrVector vn_update(const LlrVector& f,
                    const std::vector<const LlrVector*>& incoming, bool hidden,
                    InputConstraint constraint, const RingParams& p);

// Check-node rule toward a target variable with weight `target`: relabel
// each incoming belief by its weight, convolve the probability-domain
// messages over the additive group, and read the result at neg(target*a).
// cn_update_full is the exact O(Q^2) reference; cn_update_fft uses the
// transform fast path when the base is a power of two and silently falls
// back otherwise.
using WeightedLlr = std::pair<const LlrVector*, FilterIndex>;
LlrVector cn_update_full(const std::vector<WeightedLlr>& incoming,
                         FilterIndex target, const RingParams& p);
LlrVector cn_update_fft(const std::vector<WeightedLlr>& incoming,
                        FilterIndex target, const RingParams& p);

// Reusable check-update kernel: owns the operation tables, the two weight
// relabelings of a code (1 and g1) and preallocated scratch.
class CheckCombiner {
 public:
  CheckCombiner(const RingParams& p, FilterIndex g, CheckMethod method);

  const GroupTables& tables() const { return tables_; }
  const WeightPerm& unit() const { return unit_; }
  const WeightPerm& gperm() const { return gperm_; }
  bool fast_path() const { return fast_; }

  // Degree-3 check: belief over the target from two incoming messages.
  void combine(const LlrVector& m1, const WeightPerm& w1, const LlrVector& m2,
               const WeightPerm& w2, const WeightPerm& target, LlrVector& out);
  // Degree-2 check: pure relabeling, exact in the LLR domain.
  void passthrough(const LlrVector& m, const WeightPerm& w,
                   const WeightPerm& target, LlrVector& out) const;

 private:
  void load_prob(const LlrVector& m, const WeightPerm& w, Eigen::ArrayXd& dst) const;

  GroupTables tables_;
  WeightPerm unit_, gperm_;
  bool fast_ = false;
  Eigen::ArrayXd p1_, p2_, conv_;
  Eigen::ArrayXcd c1_, c2_;
};

// Flooding sum-product decoder on the RASC parity graph. parity_llrs holds
// one channel LLR vector per parity position; hidden info nodes start from
// zero vectors. Early-stops when the tentative decision satisfies every
// check. Returns the info-symbol decision (argmax of f + sum R over the
// input set, ties to the lowest index).
std::pair<std::vector<int32_t>, DecodeDiagnostics> decode(
    const std::vector<LlrVector>& parity_llrs, const ParityGraph& graph,
    int max_iters, CheckMethod method);

}  // namespace rasc
