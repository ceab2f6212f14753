#pragma once

#include <Eigen/Core>
#include <limits>

namespace rasc {

// Log-likelihood vector over the ring, entry i = log p(a_i) + const.
// Normalized form has max entry 0; impossible symbols carry -inf.
using LlrVector = Eigen::ArrayXd;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Probability floor applied before logs in the convolution-based check.
constexpr double kProbFloor = 1e-30;

inline void normalize_max0(LlrVector& v) {
  const double m = v.maxCoeff();
  if (m != 0.0 && std::isfinite(m)) v -= m;
}

// Argmax with ties broken toward the lowest index.
inline int32_t argmax_lowest(const LlrVector& v, int32_t limit) {
  int32_t best = 0;
  double bv = v[0];
  for (int32_t i = 1; i < limit; ++i) {
    if (v[i] > bv) {
      bv = v[i];
      best = i;
    }
  }
  return best;
}

}  // namespace rasc
