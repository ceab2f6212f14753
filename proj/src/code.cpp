#include "rasc/code.hpp"

#include <cmath>
#include <numeric>

#include "rasc/errors.hpp"

namespace rasc {

CodeConfig make_code_config(RingParams ring, int repeats, int info_len,
                            FilterIndex filter, InputConstraint constraint,
                            uint64_t interleaver_seed, bool terminate) {
  if (repeats < 2) throw param_error("repetition factor must be >= 2");
  if (info_len < 1) throw param_error("information length must be >= 1");
  if (constraint == InputConstraint::kFullRing && ring.phases != 2) {
    throw param_error("full-ring input requires exactly 2 phases");
  }
  if (!is_bijective(filter, ring)) {
    throw filter_error("filter " + std::to_string(filter.value) + " is not bijective");
  }
  return CodeConfig{ring,     repeats,          info_len, filter,
                    constraint, interleaver_seed, terminate};
}

std::vector<int32_t> interleaver(const CodeConfig& cfg) {
  const int n = cfg.repeats * cfg.info_len;
  std::vector<int32_t> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = Rng::stream(cfg.interleaver_seed, {kTagInterleaver});
  for (int i = n - 1; i > 0; --i) {
    const uint32_t j = rng.uniform_u32(uint32_t(i) + 1);
    std::swap(perm[size_t(i)], perm[size_t(j)]);
  }
  return perm;
}

std::vector<int32_t> random_info(const CodeConfig& cfg, Rng& rng) {
  std::vector<int32_t> s(size_t(cfg.info_len));
  const uint32_t m = uint32_t(cfg.input_set_size());
  for (int32_t& v : s) v = int32_t(rng.uniform_u32(m));
  return s;
}

std::vector<int32_t> repeat_interleave(const std::vector<int32_t>& s,
                                       const CodeConfig& cfg) {
  if (int(s.size()) != cfg.info_len) throw param_error("info length mismatch");
  const int32_t limit = cfg.input_set_size();
  for (int32_t v : s) {
    if (v < 0 || v >= limit) throw param_error("info symbol outside input set");
  }
  const std::vector<int32_t> perm = interleaver(cfg);
  std::vector<int32_t> cp(perm.size());
  for (size_t t = 0; t < perm.size(); ++t) {
    cp[t] = s[size_t(perm[t] / cfg.repeats)];
  }
  return cp;
}

std::vector<int32_t> accumulate(const std::vector<int32_t>& cprime,
                                const CodeConfig& cfg) {
  const RingElement g = element_of(cfg.filter.value, cfg.ring);
  std::vector<int32_t> x;
  x.reserve(cprime.size() + 1);
  RingElement prev = element_of(0, cfg.ring);
  for (int32_t c : cprime) {
    prev = neg(add(element_of(c, cfg.ring), mul(g, prev)));
    x.push_back(index_of(prev));
  }
  if (cfg.terminate) x.push_back(index_of(neg(mul(g, prev))));
  return x;
}

std::vector<int32_t> encode(const std::vector<int32_t>& s,
                            const CodeConfig& cfg) {
  return accumulate(repeat_interleave(s, cfg), cfg);
}

bool verify_parity(const std::vector<int32_t>& x, const std::vector<int32_t>& s,
                   const CodeConfig& cfg) {
  if (int(x.size()) != cfg.coded_len() || int(s.size()) != cfg.info_len) {
    throw param_error("verify_parity: length mismatch");
  }
  const std::vector<int32_t> cp = repeat_interleave(s, cfg);
  const RingElement g = element_of(cfg.filter.value, cfg.ring);
  const RingElement zero = element_of(0, cfg.ring);
  RingElement prev = zero;
  for (size_t t = 0; t < cp.size(); ++t) {
    const RingElement xt = element_of(x[t], cfg.ring);
    const RingElement chk =
        add(add(element_of(cp[t], cfg.ring), xt), mul(g, prev));
    if (!(chk == zero)) return false;
    prev = xt;
  }
  if (cfg.terminate) {
    const RingElement xt = element_of(x.back(), cfg.ring);
    if (!(add(xt, mul(g, prev)) == zero)) return false;
  }
  return true;
}

double rate(const CodeConfig& cfg) {
  const double bits = std::log2(double(cfg.input_set_size()));
  if (!cfg.terminate) return bits / double(cfg.repeats);
  return double(cfg.info_len) * bits / double(cfg.coded_len());
}

namespace {

ParityGraph build_graph_impl(const CodeConfig& cfg,
                             const std::vector<int32_t>& perm) {
  ParityGraph g;
  g.cfg = cfg;
  g.num_info = cfg.info_len;
  g.num_parity = cfg.coded_len();
  const int32_t body = int32_t(cfg.repeats) * cfg.info_len;
  const int32_t checks = body + (cfg.terminate ? 1 : 0);
  g.check_offsets.reserve(size_t(checks) + 1);
  g.check_offsets.push_back(0);
  for (int32_t t = 0; t < body; ++t) {
    g.edges.push_back({perm[size_t(t)] / cfg.repeats, false});
    g.edges.push_back({g.parity_var(t), false});
    if (t > 0) g.edges.push_back({g.parity_var(t - 1), true});
    g.check_offsets.push_back(int32_t(g.edges.size()));
  }
  if (cfg.terminate) {
    g.edges.push_back({g.parity_var(body), false});
    g.edges.push_back({g.parity_var(body - 1), true});
    g.check_offsets.push_back(int32_t(g.edges.size()));
  }
  // variable -> edge adjacency
  const int32_t nv = g.num_vars();
  std::vector<int32_t> deg(size_t(nv), 0);
  for (const GraphEdge& e : g.edges) ++deg[size_t(e.var)];
  g.var_offsets.assign(size_t(nv) + 1, 0);
  for (int32_t v = 0; v < nv; ++v) g.var_offsets[size_t(v) + 1] = g.var_offsets[size_t(v)] + deg[size_t(v)];
  g.var_edges.resize(g.edges.size());
  std::vector<int32_t> fill(g.var_offsets.begin(), g.var_offsets.end() - 1);
  for (int32_t e = 0; e < int32_t(g.edges.size()); ++e) {
    g.var_edges[size_t(fill[size_t(g.edges[size_t(e)].var)]++)] = e;
  }
  return g;
}

}  // namespace

ParityGraph build_graph(const CodeConfig& cfg) {
  return build_graph_impl(cfg, interleaver(cfg));
}

ParityGraph build_graph(const CodeConfig& cfg,
                        const std::vector<int32_t>& permutation) {
  if (int(permutation.size()) != cfg.repeats * cfg.info_len) {
    throw param_error("permutation length mismatch");
  }
  return build_graph_impl(cfg, permutation);
}

bool turbo_parity_identity_check(const RingParams& p, FilterIndex g1,
                                 int num_frames, int frame_len, uint64_t seed) {
  if (p.base != 2) throw param_error("turbo identity check requires base 2");
  const RingElement g = element_of(g1.value, p);
  const RingElement f0 = neg(element_of(1, p));
  Rng rng(seed);
  for (int fr = 0; fr < num_frames; ++fr) {
    RingElement u_prev = element_of(0, p);
    for (int t = 0; t < frame_len; ++t) {
      const RingElement s = element_of(int32_t(rng.uniform_u32(uint32_t(p.size()))), p);
      // state u_t = s_t + g1*u_{t-1}; output x_t = f1*u_{t-1} + f0*u_t
      const RingElement u = add(s, mul(g, u_prev));
      const RingElement x = add(mul(g, u_prev), mul(f0, u));
      if (!(x == s)) return false;
      u_prev = u;
    }
  }
  return true;
}

}  // namespace rasc
