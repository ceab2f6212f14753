#include "rasc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rasc/errors.hpp"

namespace rasc {

namespace {

double nominal_rate(const DeCode& code) {
  const double bits = std::log2(
      double(code.constraint == InputConstraint::kQam ? code.ring.qam_size()
                                                      : code.ring.size()));
  return bits / double(code.repeats);
}

}  // namespace

McdeOutcome mcde_converges(const DeCode& code, double sigma,
                           const McdeConfig& cfg, uint64_t run_tag) {
  if (sigma <= 0.0) throw param_error("sigma must be positive");
  if (code.repeats < 2) throw param_error("repetition factor must be >= 2");
  if (code.constraint == InputConstraint::kFullRing && code.ring.phases != 2) {
    throw param_error("full-ring input requires exactly 2 phases");
  }
  CheckCombiner cc(code.ring, code.filter, cfg.method);
  const GroupTables& tab = cc.tables();
  const Eigen::ArrayXcd pts = constellation(code.ring);
  const ChannelParams ch{sigma * sigma};
  const int32_t q = tab.q;
  const int32_t qam = code.ring.qam_size();
  const bool restrict_info = code.constraint == InputConstraint::kQam;
  const int32_t limit = restrict_info ? qam : q;
  const int n = cfg.pool_size;
  const int deg = code.repeats;

  auto fresh_llr = [&](Rng& rng) {
    const int32_t r = draw_coset(code.ring, rng);
    const std::complex<double> y = pts[r] + rng.cnormal(ch.noise_var);
    return coset_delabel(channel_llr(y, pts, ch), r, tab);
  };

  LlrVector info_init = LlrVector::Zero(q);
  if (restrict_info) info_init.tail(q - qam).setConstant(kNegInf);

  // pools: info-to-check (qi), parity-to-check split by edge weight
  // (qp1 along weight-1 edges, qpg along weight-g edges), check-to-info
  // (ri), check-to-parity split the same way (rp1 toward weight-1 edges,
  // rpg toward weight-g edges)
  std::vector<LlrVector> qi(size_t(n), info_init);
  std::vector<LlrVector> qp1(static_cast<size_t>(n));
  std::vector<LlrVector> qpg(static_cast<size_t>(n));
  std::vector<LlrVector> ri(static_cast<size_t>(n));
  std::vector<LlrVector> rp1(static_cast<size_t>(n));
  std::vector<LlrVector> rpg(static_cast<size_t>(n));
  {
    Rng rng = Rng::stream(cfg.seed, {kTagMcdeRun, run_tag, 0, 0});
    for (int s = 0; s < n; ++s) qp1[size_t(s)] = fresh_llr(rng);
    for (int s = 0; s < n; ++s) qpg[size_t(s)] = fresh_llr(rng);
  }

  LlrVector app(q);
  double pe = 1.0;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const uint64_t it = uint64_t(iter);
    // R pools from the current Q pools. A check connects one info symbol
    // (weight 1), the current parity symbol (weight 1) and the previous
    // parity symbol (weight g1).
    {
      Rng rng = Rng::stream(cfg.seed, {kTagMcdeRun, run_tag, it, 1});
      for (int s = 0; s < n; ++s) {
        const LlrVector& a = qp1[rng.uniform_u32(uint32_t(n))];
        const LlrVector& b = qpg[rng.uniform_u32(uint32_t(n))];
        cc.combine(a, cc.unit(), b, cc.gperm(), cc.unit(), ri[size_t(s)]);
      }
    }
    {
      // toward the weight-1 parity: the weight-g1 neighbor feeds in
      Rng rng = Rng::stream(cfg.seed, {kTagMcdeRun, run_tag, it, 2});
      for (int s = 0; s < n; ++s) {
        const LlrVector& a = qi[rng.uniform_u32(uint32_t(n))];
        const LlrVector& b = qpg[rng.uniform_u32(uint32_t(n))];
        cc.combine(a, cc.unit(), b, cc.gperm(), cc.unit(), rp1[size_t(s)]);
      }
    }
    {
      // toward the weight-g1 parity: the weight-1 neighbor feeds in
      Rng rng = Rng::stream(cfg.seed, {kTagMcdeRun, run_tag, it, 3});
      for (int s = 0; s < n; ++s) {
        const LlrVector& a = qi[rng.uniform_u32(uint32_t(n))];
        const LlrVector& b = qp1[rng.uniform_u32(uint32_t(n))];
        cc.combine(a, cc.unit(), b, cc.unit(), cc.gperm(), rpg[size_t(s)]);
      }
    }
    // error estimate: info posterior = sum of `deg` independent check
    // messages; under the delabeled all-zero convention an error is any
    // argmax other than symbol 0
    {
      Rng rng = Rng::stream(cfg.seed, {kTagMcdeRun, run_tag, it, 4});
      int errors = 0;
      for (int s = 0; s < n; ++s) {
        app = ri[rng.uniform_u32(uint32_t(n))];
        for (int k = 1; k < deg; ++k) {
          app += ri[rng.uniform_u32(uint32_t(n))];
        }
        if (argmax_lowest(app, limit) != 0) ++errors;
      }
      pe = double(errors) / double(n);
    }
    if (pe < cfg.err_threshold) return {true, pe, iter};
    // Q pools from the new R pools; fresh channel samples enter at parity.
    // A parity variable's outgoing message on one edge carries the check
    // message that arrived on its other edge.
    {
      Rng rng = Rng::stream(cfg.seed, {kTagMcdeRun, run_tag, it, 5});
      for (int s = 0; s < n; ++s) {
        qp1[size_t(s)] = fresh_llr(rng) + rpg[rng.uniform_u32(uint32_t(n))];
        normalize_max0(qp1[size_t(s)]);
      }
    }
    {
      Rng rng = Rng::stream(cfg.seed, {kTagMcdeRun, run_tag, it, 6});
      for (int s = 0; s < n; ++s) {
        qpg[size_t(s)] = fresh_llr(rng) + rp1[rng.uniform_u32(uint32_t(n))];
        normalize_max0(qpg[size_t(s)]);
      }
    }
    {
      Rng rng = Rng::stream(cfg.seed, {kTagMcdeRun, run_tag, it, 7});
      for (int s = 0; s < n; ++s) {
        LlrVector& out = qi[size_t(s)];
        out = ri[rng.uniform_u32(uint32_t(n))];
        for (int k = 2; k < deg; ++k) {
          out += ri[rng.uniform_u32(uint32_t(n))];
        }
        if (restrict_info) out.tail(q - qam).setConstant(kNegInf);
        normalize_max0(out);
      }
    }
  }
  return {false, pe, cfg.max_iters};
}

ThresholdResult threshold_search(const DeCode& code, const McdeConfig& cfg) {
  ThresholdResult res;
  res.rate = nominal_rate(code);
  res.shannon_limit_snr_db = shannon_limit_db(res.rate);
  const double sigma_sh =
      std::sqrt(avg_power(code.ring) / (std::pow(2.0, res.rate) - 1.0));
  res.bracket_lo = cfg.sigma_lo > 0.0 ? cfg.sigma_lo : 0.6 * sigma_sh;
  res.bracket_hi = cfg.sigma_hi > 0.0 ? cfg.sigma_hi : 1.02 * sigma_sh;
  if (res.bracket_hi <= res.bracket_lo) throw param_error("empty sigma bracket");

  for (int run = 0; run < cfg.num_runs; ++run) {
    double lo = res.bracket_lo;
    double hi = res.bracket_hi;
    std::vector<std::pair<double, bool>> trace;
    auto conv = [&](double s) {
      const bool ok = mcde_converges(code, s, cfg, uint64_t(run)).converged;
      trace.push_back({s, ok});
      return ok;
    };
    int guard = 0;
    bool hi_known_failing = false;
    while (!conv(lo)) {
      hi = lo;
      hi_known_failing = true;
      lo *= 0.8;
      if (++guard > 16) throw param_error("no converging sigma found");
    }
    if (!hi_known_failing) {
      guard = 0;
      while (conv(hi)) {
        lo = hi;
        hi *= 1.25;
        if (++guard > 16) throw param_error("no failing sigma found");
      }
    }
    while (hi - lo > cfg.sigma_tol) {
      const double mid = 0.5 * (lo + hi);
      if (conv(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    res.sigma_runs.push_back(0.5 * (lo + hi));
    res.traces.push_back(std::move(trace));
  }

  double ssum = 0.0, dbsum = 0.0;
  for (double s : res.sigma_runs) {
    ssum += s;
    dbsum += snr_db(code.ring, s * s);
  }
  const double nr = double(res.sigma_runs.size());
  res.sigma_mean = ssum / nr;
  res.snr_db_mean = dbsum / nr;
  res.shannon_gap_db = res.snr_db_mean - res.shannon_limit_snr_db;
  return res;
}

std::vector<int32_t> affine_orbit(FilterIndex g, const RingParams& p) {
  const RingElement jel = element_of(p.base, p);  // v_0^Q = 1, i.e. j
  RingElement a = element_of(g.value, p);
  RingElement b = conjugate(a);
  std::set<int32_t> orbit;
  for (int t = 0; t < 4; ++t) {
    orbit.insert(index_of(a));
    orbit.insert(index_of(b));
    a = mul(jel, a);
    b = mul(jel, b);
  }
  return std::vector<int32_t>(orbit.begin(), orbit.end());
}

FilterIndex affine_class(FilterIndex g, const RingParams& p) {
  return FilterIndex{affine_orbit(g, p).front()};
}

std::vector<FilterRank> filter_search(const DeCode& base, const McdeConfig& cfg,
                                      bool collapse_affine) {
  if (base.ring.size() > 256) {
    throw param_error("exhaustive filter search requires ring size <= 256");
  }
  const std::vector<int32_t> filters = bijective_filters(base.ring);
  std::map<int32_t, ThresholdResult> cache;
  std::vector<FilterRank> out;
  out.reserve(filters.size());
  for (int32_t fb : filters) {
    const int32_t cls = affine_class(FilterIndex{fb}, base.ring).value;
    const int32_t key = collapse_affine ? cls : fb;
    auto it = cache.find(key);
    if (it == cache.end()) {
      DeCode c = base;
      c.filter = FilterIndex{key};
      McdeConfig mc = cfg;
      mc.seed = detail::mix64(cfg.seed ^ detail::mix64(uint64_t(key)));
      it = cache.emplace(key, threshold_search(c, mc)).first;
    }
    const ThresholdResult& tr = it->second;
    out.push_back({fb, filter_taps(FilterIndex{fb}, base.ring), cls, tr.sigma_mean,
                   tr.snr_db_mean, tr.shannon_gap_db});
  }
  std::sort(out.begin(), out.end(), [](const FilterRank& a, const FilterRank& b) {
    if (a.threshold_snr_db != b.threshold_snr_db) {
      return a.threshold_snr_db < b.threshold_snr_db;
    }
    return a.fb < b.fb;
  });
  return out;
}

}  // namespace rasc
