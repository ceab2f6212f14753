#include "rasc/channel.hpp"

#include <cmath>

#include "rasc/errors.hpp"

namespace rasc {

double snr_db(const RingParams& p, double noise_var) {
  if (noise_var <= 0.0) throw param_error("noise variance must be positive");
  return 10.0 * std::log10(avg_power(p) / noise_var);
}

double noise_var_from_snr_db(const RingParams& p, double snr) {
  return avg_power(p) / std::pow(10.0, snr / 10.0);
}

double shannon_limit_db(double rate) {
  if (rate <= 0.0) throw param_error("rate must be positive");
  return 10.0 * std::log10(std::pow(2.0, rate) - 1.0);
}

std::vector<std::complex<double>> transmit(const std::vector<int32_t>& x,
                                           const Eigen::ArrayXcd& points,
                                           const ChannelParams& ch, Rng& rng) {
  if (ch.noise_var <= 0.0) throw param_error("noise variance must be positive");
  std::vector<std::complex<double>> y(x.size());
  for (size_t t = 0; t < x.size(); ++t) {
    y[t] = points[x[t]] + rng.cnormal(ch.noise_var);
  }
  return y;
}

LlrVector channel_llr(std::complex<double> y, const Eigen::ArrayXcd& points,
                      const ChannelParams& ch) {
  const Eigen::Index q = points.size();
  LlrVector f(q);
  const double d0 = std::norm(y - points[0]);
  for (Eigen::Index i = 0; i < q; ++i) {
    double v = (d0 - std::norm(y - points[i])) / ch.noise_var;
    if (v > 700.0) v = 700.0;
    if (v < -700.0) v = -700.0;
    f[i] = v;
  }
  f[0] = 0.0;
  return f;
}

int32_t draw_coset(const RingParams& p, Rng& rng) {
  return int32_t(rng.uniform_u32(uint32_t(p.size())));
}

void coset_apply(std::vector<int32_t>& x, int32_t r, const GroupTables& t) {
  for (int32_t& v : x) v = t.add(v, r);
}

LlrVector coset_delabel(const LlrVector& f, int32_t r, const GroupTables& t) {
  LlrVector out(f.size());
  for (int32_t i = 0; i < t.q; ++i) out[i] = f[t.add(i, r)];
  out -= out[0];
  return out;
}

}  // namespace rasc
