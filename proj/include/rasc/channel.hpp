#pragma once

#include <complex>
#include <vector>

#include "rasc/llr.hpp"
#include "rasc/ring.hpp"
#include "rasc/rng.hpp"

namespace rasc {

// Complex AWGN with total noise variance noise_var (noise_var/2 per real
// dimension). SNR is defined as Es/N0 = avg_power(ring) / noise_var.
struct ChannelParams {
  double noise_var = 1.0;
};

double snr_db(const RingParams& p, double noise_var);
double noise_var_from_snr_db(const RingParams& p, double snr_db);

// Shannon limit for a complex AWGN channel at the given rate in bits per
// channel use, under the Es/N0 convention: 10 log10(2^rate - 1).
double shannon_limit_db(double rate);

// Maps symbol indices to centered constellation points and adds noise.
std::vector<std::complex<double>> transmit(const std::vector<int32_t>& x,
                                           const Eigen::ArrayXcd& points,
                                           const ChannelParams& ch, Rng& rng);

// Per-symbol channel LLRs relative to index 0:
//   f_i = (|y - p_0|^2 - |y - p_i|^2) / noise_var,
// clamped to +-700 to keep later exp() finite.
LlrVector channel_llr(std::complex<double> y, const Eigen::ArrayXcd& points,
                      const ChannelParams& ch);

// Random coset: the transmitter adds a uniform ring element r to every symbol
// so the channel input is symmetric over the constellation; the receiver
// delabels by permuting LLR entries so index i again refers to offset i from
// the transmitted symbol's coset representative.
int32_t draw_coset(const RingParams& p, Rng& rng);
void coset_apply(std::vector<int32_t>& x, int32_t r, const GroupTables& t);
LlrVector coset_delabel(const LlrVector& f, int32_t r, const GroupTables& t);

}  // namespace rasc
