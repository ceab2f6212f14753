#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rasc/errors.hpp"

namespace rasc {

// The symbol alphabet is the set of formal sums
//   a = sum_{i<phases} (v_i^I + j v_i^Q) w^i,   w = exp(j pi / (2*phases)),
// with coefficients v in [0, base). Addition is coefficient-wise mod base.
// Multiplication treats a as a polynomial in w and reduces with
// w^(2*phases) = -1 (j itself is w^phases), i.e. arithmetic happens in
// Z_base[w] / (w^(2*phases) + 1). Elements are indexed by the base-`base`
// expansion of the interleaved coefficient vector
// (v_0^I, v_0^Q, v_1^I, v_1^Q, ...), least significant digit first.
struct RingParams {
  int base = 0;    // coefficient alphabet size
  int phases = 0;  // number of phase shifts w^0 .. w^(phases-1)

  int dim() const { return 2 * phases; }
  int32_t size() const {
    int32_t q = 1;
    for (int i = 0; i < dim(); ++i) q *= base;
    return q;
  }
  // Indices below base^2 have only v_0^I, v_0^Q nonzero: the QAM subset.
  int32_t qam_size() const { return int32_t(base) * base; }

  friend bool operator==(const RingParams&, const RingParams&) = default;
};

// Validates the supported envelope: base in {2,3,4}, phases in {1..4}.
RingParams make_ring_params(int base, int phases);

constexpr int kMaxRingDim = 8;

struct RingElement {
  RingParams params;
  std::array<int8_t, kMaxRingDim> c{};  // interleaved coefficients, c[2i]=v_i^I

  friend bool operator==(const RingElement&, const RingElement&) = default;
};

// A multiplier element referenced by index; required bijective where noted.
struct FilterIndex {
  int32_t value = 0;
  friend bool operator==(const FilterIndex&, const FilterIndex&) = default;
};

int32_t index_of(const RingElement& e);
RingElement element_of(int32_t index, const RingParams& p);

RingElement add(const RingElement& a, const RingElement& b);
RingElement neg(const RingElement& a);
RingElement mul(const RingElement& a, const RingElement& b);
// Complex conjugation of the embedding: embed(conjugate(a)) = conj(embed(a)).
RingElement conjugate(const RingElement& a);

// Raw complex point sum_i (v_i^I + j v_i^Q) w^i.
std::complex<double> embed(const RingElement& e);
// Constant subtracted so the full-ring constellation has zero mean:
// ((base-1)/2)(1+j) sum_i w^i.
std::complex<double> center_offset(const RingParams& p);
std::complex<double> embed_centered(const RingElement& e);

// Mean squared magnitude of the centered full-ring constellation,
// phases * (base^2 - 1) / 6 exactly.
double avg_power(const RingParams& p);

// True iff x -> g*x is a permutation of the ring.
bool is_bijective(FilterIndex g, const RingParams& p);

// perm[i] = index_of(g * element_of(i)); throws filter_error if g is not
// bijective.
std::vector<int32_t> mul_permutation(FilterIndex g, const RingParams& p);

// All filter indices g with bijective multiplication, ascending.
std::vector<int32_t> bijective_filters(const RingParams& p);

// Human-readable tap list "(v_0^I,v_0^Q),(v_1^I,v_1^Q),...".
std::string filter_taps(FilterIndex g, const RingParams& p);

// Centered constellation point for every index; optional premultiplication
// by g (for inspecting filtered labelings).
Eigen::ArrayXcd constellation(const RingParams& p);
Eigen::ArrayXcd constellation(const RingParams& p, FilterIndex g);

// Number of geometrically distinct points (exact coincidences merged).
int distinct_points(const Eigen::ArrayXcd& pts, double tol = 1e-9);

// Dense index-level operation tables for decoder and analysis hot paths.
// The add table is materialized only when size() is small enough.
struct GroupTables {
  RingParams params;
  int32_t q = 0;
  std::vector<int32_t> neg_perm;
  std::vector<int32_t> add_table;  // q*q entries, or empty

  explicit GroupTables(const RingParams& p);

  int32_t add(int32_t u, int32_t v) const {
    if (!add_table.empty()) return add_table[size_t(u) * q + v];
    return add_slow(u, v);
  }
  int32_t neg(int32_t u) const { return neg_perm[u]; }

 private:
  int32_t add_slow(int32_t u, int32_t v) const;
};

}  // namespace rasc
