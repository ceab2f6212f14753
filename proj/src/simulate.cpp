#include "rasc/simulate.hpp"

#include "rasc/errors.hpp"

namespace rasc {

std::vector<SimPoint> simulate(const SimConfig& cfg) {
  if (cfg.snr_db_list.empty()) throw param_error("no SNR points given");
  if (cfg.max_frames < 1) throw param_error("frame budget must be >= 1");
  const CodeConfig& code = cfg.code;
  const ParityGraph graph = build_graph(code);
  const Eigen::ArrayXcd pts = constellation(code.ring);
  const EmsConfig ems = cfg.decoder == DecoderKind::kEms
                            ? resolve_ems_config(cfg.ems.list_size, cfg.ems.eta, code.ring)
                            : cfg.ems;

  std::vector<SimPoint> out;
  out.reserve(cfg.snr_db_list.size());
  for (size_t pt = 0; pt < cfg.snr_db_list.size(); ++pt) {
    SimPoint sp;
    sp.snr_db = cfg.snr_db_list[pt];
    const ChannelParams ch{noise_var_from_snr_db(code.ring, sp.snr_db)};
    long iter_sum = 0;
    std::vector<LlrVector> llrs(size_t(code.coded_len()));
    while (sp.frames < cfg.max_frames &&
           (cfg.target_errors <= 0 || sp.symbol_errors < cfg.target_errors)) {
      Rng src = Rng::stream(cfg.seed, {kTagFrameSource, uint64_t(pt), uint64_t(sp.frames)});
      Rng noise = Rng::stream(cfg.seed, {kTagFrameNoise, uint64_t(pt), uint64_t(sp.frames)});
      const std::vector<int32_t> s = random_info(code, src);
      const std::vector<int32_t> x = encode(s, code);
      const std::vector<std::complex<double>> y = transmit(x, pts, ch, noise);
      for (size_t t = 0; t < y.size(); ++t) {
        llrs[t] = channel_llr(y[t], pts, ch);
      }
      std::vector<int32_t> est;
      DecodeDiagnostics diag;
      switch (cfg.decoder) {
        case DecoderKind::kFullBp:
          std::tie(est, diag) = decode(llrs, graph, cfg.max_iters, CheckMethod::kFull);
          break;
        case DecoderKind::kFftBp:
          std::tie(est, diag) = decode(llrs, graph, cfg.max_iters, CheckMethod::kFft);
          break;
        case DecoderKind::kEms:
          std::tie(est, diag) = ems_decode(llrs, graph, ems, cfg.max_iters);
          break;
      }
      long errs = 0;
      for (int t = 0; t < code.info_len; ++t) {
        if (est[size_t(t)] != s[size_t(t)]) ++errs;
      }
      sp.symbol_errors += errs;
      if (errs > 0) ++sp.frame_errors;
      iter_sum += diag.iterations;
      ++sp.frames;
    }
    const double denom = double(sp.frames) * double(code.info_len);
    sp.ser = double(sp.symbol_errors) / denom;
    sp.fer = double(sp.frame_errors) / double(sp.frames);
    sp.avg_iters = double(iter_sum) / double(sp.frames);
    out.push_back(sp);
  }
  return out;
}

}  // namespace rasc
