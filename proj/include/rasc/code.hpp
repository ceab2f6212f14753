#pragma once

#include <cstdint>
#include <vector>

#include "rasc/ring.hpp"
#include "rasc/rng.hpp"

namespace rasc {

enum class InputConstraint { kQam, kFullRing };

// Repeat-accumulate signal code: q-fold repetition, seeded random
// interleaver, rate-1 accumulator x_t = neg(c'_t + g1 * x_{t-1}) with x_0 = 0.
// Only parity symbols are transmitted (non-systematic). Symbol sequences are
// carried as ring indices.
struct CodeConfig {
  RingParams ring;
  int repeats = 2;    // q
  int info_len = 1;   // Ns
  FilterIndex filter; // g1, bijective
  InputConstraint constraint = InputConstraint::kQam;
  uint64_t interleaver_seed = 0;
  bool terminate = true;

  int coded_len() const { return repeats * info_len + (terminate ? 1 : 0); }
  // Size of the per-symbol input set.
  int32_t input_set_size() const {
    return constraint == InputConstraint::kQam ? ring.qam_size() : ring.size();
  }
};

// Validates q >= 2, Ns >= 1, bijective filter; FULL_RING requires phases = 2
// (the only case where the full ring is a product of two QAM symbols).
CodeConfig make_code_config(RingParams ring, int repeats, int info_len,
                            FilterIndex filter, InputConstraint constraint,
                            uint64_t interleaver_seed, bool terminate);

// Seeded Fisher-Yates permutation of [0, q*Ns).
std::vector<int32_t> interleaver(const CodeConfig& cfg);

// Uniform info sequence over the input set.
std::vector<int32_t> random_info(const CodeConfig& cfg, Rng& rng);

// c = (s_0, s_0, ..., s_1, s_1, ...) then c'_t = c_{perm[t]}.
std::vector<int32_t> repeat_interleave(const std::vector<int32_t>& s,
                                       const CodeConfig& cfg);

// Accumulator recurrence; appends the termination symbol
// x_{Nc} = neg(g1 * x_{Nc-1}) when cfg.terminate.
std::vector<int32_t> accumulate(const std::vector<int32_t>& cprime,
                                const CodeConfig& cfg);

std::vector<int32_t> encode(const std::vector<int32_t>& s,
                            const CodeConfig& cfg);

// Every check equation c'_t + x_t + g1 * x_{t-1} = 0 holds (termination
// check included when enabled).
bool verify_parity(const std::vector<int32_t>& x, const std::vector<int32_t>& s,
                   const CodeConfig& cfg);

// Bits per channel use; termination reduces the rate to
// Ns * log2(input set) / Nc.
double rate(const CodeConfig& cfg);

// Parity graph over N = Ns + Nc variables: var ids [0, Ns) are hidden info
// columns, [Ns, Ns + Nc) are parity columns. Check t < q*Ns connects the
// interleaved info position, parity t (weight 1) and parity t-1 (weight g1,
// absent at t = 0); the termination check connects only the last two parity
// columns.
struct GraphEdge {
  int32_t var;    // variable id
  bool weighted;  // true: multiplied by g1, false: weight 1
};

struct ParityGraph {
  CodeConfig cfg;
  int32_t num_info = 0;
  int32_t num_parity = 0;
  std::vector<int32_t> check_offsets;  // per-check ranges into edges
  std::vector<GraphEdge> edges;
  std::vector<int32_t> var_offsets;  // per-variable ranges into var_edges
  std::vector<int32_t> var_edges;    // edge ids

  int32_t num_checks() const { return int32_t(check_offsets.size()) - 1; }
  int32_t num_vars() const { return num_info + num_parity; }
  int32_t parity_var(int32_t t) const { return num_info + t; }
};

ParityGraph build_graph(const CodeConfig& cfg);
// Same structure with an explicit permutation of the repeated sequence
// (for pinning down small reference graphs).
ParityGraph build_graph(const CodeConfig& cfg,
                        const std::vector<int32_t>& permutation);

// Two-feedforward/one-feedback encoder with the parity-forced filters
// f0 = neg(1), f1 = g1 collapses to x_t = s_t when the base is 2, i.e. the
// feedback filter cannot shape the transmitted signal. Returns true iff the
// identity held on every sample.
bool turbo_parity_identity_check(const RingParams& p, FilterIndex g1,
                                 int num_frames, int frame_len, uint64_t seed);

}  // namespace rasc
