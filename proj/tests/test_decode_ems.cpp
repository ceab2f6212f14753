#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "rasc/channel.hpp"
#include "rasc/decode_ems.hpp"

using namespace rasc;

namespace {

LlrVector random_llr(int32_t q, Rng& rng, double scale = 3.0) {
  LlrVector m(q);
  for (int32_t i = 0; i < q; ++i) m[i] = scale * rng.normal();
  normalize_max0(m);
  return m;
}

void check_invariants(const TruncMsg& m, const EmsConfig& cfg, int32_t q) {
  CHECK(m.size() <= cfg.list_size);
  if (m.size() == 0) {
    CHECK(m.gamma == kNegInf);
    return;
  }
  CHECK(m.values.front() == 0.0);
  std::vector<uint8_t> seen(size_t(q), 0);
  for (int k = 0; k < m.size(); ++k) {
    CHECK(std::isfinite(m.values[size_t(k)]));
    if (k) CHECK(m.values[size_t(k)] <= m.values[size_t(k) - 1]);
    CHECK(m.symbols[size_t(k)] >= 0);
    CHECK(m.symbols[size_t(k)] < q);
    CHECK_FALSE(seen[size_t(m.symbols[size_t(k)])]);
    seen[size_t(m.symbols[size_t(k)])] = 1;
  }
  if (m.size() < q) {
    CHECK(m.gamma == doctest::Approx(m.values.back() -
                                     std::log(double(q - m.size())) - cfg.eta));
  } else {
    CHECK(m.gamma == kNegInf);
  }
}

// Best-first search unrolled: all cells in descending order, first
// appearance per output label. Valid as long as the extraction cap never
// triggers and no two cells tie.
struct WalkResult {
  TruncMsg msg;
  bool capped = false;
  bool tied = false;
};

WalkResult walk_oracle(const TruncMsg& q1, const TruncMsg& q2, int32_t w1,
                       int32_t w2, int32_t wt, const EmsConfig& cfg,
                       const RingParams& p) {
  struct C {
    double v;
    int i, j;
  };
  std::vector<C> cells;
  for (int i = 0; i < q1.size(); ++i) {
    for (int j = 0; j < q2.size(); ++j) {
      cells.push_back({q1.values[size_t(i)] + q2.values[size_t(j)], i, j});
    }
  }
  std::sort(cells.begin(), cells.end(),
            [](const C& a, const C& b) { return a.v > b.v; });
  WalkResult r;
  for (size_t k = 1; k < cells.size(); ++k) {
    if (cells[k].v == cells[k - 1].v) r.tied = true;
  }
  const RingElement e1 = element_of(w1, p);
  const RingElement e2 = element_of(w2, p);
  const std::vector<int32_t> tperm = mul_permutation(FilterIndex{wt}, p);
  std::vector<int32_t> tinv(size_t(p.size()));
  for (int32_t i = 0; i < p.size(); ++i) tinv[size_t(tperm[size_t(i)])] = i;
  auto label = [&](int i, int j) {
    const RingElement s =
        add(mul(e1, element_of(q1.symbols[size_t(i)], p)),
            mul(e2, element_of(q2.symbols[size_t(j)], p)));
    return tinv[size_t(index_of(neg(s)))];
  };
  std::vector<uint8_t> seen(size_t(p.size()), 0);
  int ext = 0;
  size_t k = 0;
  for (; k < cells.size() && r.msg.size() < cfg.list_size &&
         ext < 2 * cfg.list_size;
       ++k) {
    ++ext;
    const int32_t sym = label(cells[k].i, cells[k].j);
    if (!seen[size_t(sym)]) {
      seen[size_t(sym)] = 1;
      r.msg.values.push_back(cells[k].v);
      r.msg.symbols.push_back(sym);
    }
  }
  r.capped = r.msg.size() < cfg.list_size && k < cells.size();
  if (!r.msg.values.empty()) {
    const double shift = r.msg.values.front();
    for (double& v : r.msg.values) v -= shift;
  }
  return r;
}

}  // namespace

TEST_CASE("config resolution") {
  const RingParams p = make_ring_params(4, 2);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK(resolve_ems_config(20, nan, p).eta == doctest::Approx(-3.0));
  CHECK(resolve_ems_config(40, nan, p).eta == doctest::Approx(-3.5));
  CHECK(resolve_ems_config(64, nan, p).eta == doctest::Approx(-4.7));
  CHECK(resolve_ems_config(128, nan, p).eta == doctest::Approx(-5.5));
  CHECK(resolve_ems_config(37, -2.5, p).eta == doctest::Approx(-2.5));
  CHECK_THROWS_AS(resolve_ems_config(37, nan, p), param_error);
  CHECK_THROWS_AS(resolve_ems_config(0, -3.0, p), param_error);
  CHECK_THROWS_AS(resolve_ems_config(257, -3.0, p), param_error);
}

TEST_CASE("truncate keeps the largest entries") {
  const RingParams p = make_ring_params(2, 2);
  const EmsConfig cfg{5, -4.0};
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const LlrVector v = random_llr(16, rng);
    const TruncMsg m = truncate(v, cfg, p);
    check_invariants(m, cfg, 16);
    CHECK(m.size() == 5);
    // every kept value beats every dropped value
    std::vector<uint8_t> kept(16, 0);
    for (int32_t s : m.symbols) kept[size_t(s)] = 1;
    for (int k = 0; k < m.size(); ++k) {
      CHECK(m.values[size_t(k)] ==
            doctest::Approx(v[m.symbols[size_t(k)]] - v.maxCoeff()));
    }
    const double worst_kept = m.values.back() + v.maxCoeff();
    for (int32_t i = 0; i < 16; ++i) {
      if (!kept[size_t(i)]) CHECK(v[i] <= worst_kept + 1e-12);
    }
  }
  // -inf entries never enter the list
  LlrVector v = random_llr(16, rng);
  v.tail(12).setConstant(kNegInf);
  const TruncMsg m = truncate(v, cfg, p);
  CHECK(m.size() == 4);
  for (int32_t s : m.symbols) CHECK(s < 4);
  check_invariants(m, cfg, 16);
  CHECK_THROWS_AS(truncate(LlrVector::Zero(8), cfg, p), param_error);
}

TEST_CASE("full-width vn matches the dense sum") {
  const RingParams p = make_ring_params(2, 2);
  const EmsConfig cfg{16, -4.0};
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    const LlrVector a = random_llr(16, rng);
    const LlrVector b = random_llr(16, rng);
    const TruncMsg out =
        vn_elementary(truncate(a, cfg, p), truncate(b, cfg, p), cfg, p);
    LlrVector dense = a + b;
    normalize_max0(dense);
    CHECK(out.size() == 16);
    check_invariants(out, cfg, 16);
    for (int k = 0; k < out.size(); ++k) {
      CHECK(out.values[size_t(k)] ==
            doctest::Approx(dense[out.symbols[size_t(k)]]).epsilon(1e-12));
    }
  }
}

TEST_CASE("vn uses gamma for symbols missing from the other list") {
  const RingParams p = make_ring_params(2, 2);
  const EmsConfig cfg{4, -4.0};
  Rng rng(9);
  const LlrVector a = random_llr(16, rng);
  const LlrVector b = random_llr(16, rng);
  const TruncMsg r1 = truncate(a, cfg, p);
  const TruncMsg r2 = truncate(b, cfg, p);
  // raw candidate set before sorting: r1 entries against r2 (value or
  // gamma), then r1.gamma against r2 entries
  std::vector<std::pair<double, int32_t>> raw;
  for (int k = 0; k < r1.size(); ++k) {
    double other = r2.gamma;
    for (int k2 = 0; k2 < r2.size(); ++k2) {
      if (r2.symbols[size_t(k2)] == r1.symbols[size_t(k)]) {
        other = r2.values[size_t(k2)];
      }
    }
    raw.push_back({r1.values[size_t(k)] + other, r1.symbols[size_t(k)]});
  }
  for (int k = 0; k < r2.size(); ++k) {
    raw.push_back({r1.gamma + r2.values[size_t(k)], r2.symbols[size_t(k)]});
  }
  std::sort(raw.begin(), raw.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  std::vector<std::pair<double, int32_t>> want;
  std::vector<uint8_t> seen(16, 0);
  for (const auto& c : raw) {
    if (int(want.size()) >= 4 || !std::isfinite(c.first)) break;
    if (seen[size_t(c.second)]) continue;
    seen[size_t(c.second)] = 1;
    want.push_back(c);
  }
  const TruncMsg out = vn_elementary(r1, r2, cfg, p);
  check_invariants(out, cfg, 16);
  REQUIRE(out.size() == int(want.size()));
  for (int k = 0; k < out.size(); ++k) {
    CHECK(out.symbols[size_t(k)] == want[size_t(k)].second);
    CHECK(out.values[size_t(k)] ==
          doctest::Approx(want[size_t(k)].first - want[0].first).epsilon(1e-12));
  }
}

TEST_CASE("hidden restriction covers every QAM label") {
  const RingParams p = make_ring_params(2, 2);
  const EmsConfig cfg{8, -4.0};
  Rng rng(13);
  const TruncMsg t = truncate(random_llr(16, rng), cfg, p);
  const TruncMsg h = vn_hidden_ems(t, cfg, p);
  // every QAM symbol appears exactly once, nothing else does, and non-QAM
  // symbols are impossible rather than compensated
  REQUIRE(h.size() == 4);
  std::set<int32_t> syms(h.symbols.begin(), h.symbols.end());
  CHECK(syms == std::set<int32_t>{0, 1, 2, 3});
  CHECK(h.values.front() == 0.0);
  CHECK(h.gamma == -std::numeric_limits<double>::infinity());
  for (int k = 1; k < h.size(); ++k) {
    CHECK(h.values[size_t(k)] <= h.values[size_t(k) - 1]);
  }

  // kept QAM symbols preserve relative gaps; absent ones sit at gamma'
  // anchored on the last kept QAM position
  int lz = -1;
  for (int k = 0; k < t.size(); ++k) {
    if (t.symbols[size_t(k)] < 4) lz = k;
  }
  REQUIRE(lz >= 0);
  const double gp = t.values[size_t(lz)] - std::log(16.0 - lz) - cfg.eta;
  double shift = 0.0;
  for (int k = 0; k < t.size(); ++k) {
    if (t.symbols[size_t(k)] < 4) {
      shift = std::max(shift, t.values[size_t(k)]);
    }
  }
  shift = std::max(shift, gp);
  for (int a = 0; a < h.size(); ++a) {
    double want = gp;
    for (int k = 0; k < t.size(); ++k) {
      if (t.symbols[size_t(k)] == h.symbols[size_t(a)]) want = t.values[size_t(k)];
    }
    CHECK(h.values[size_t(a)] == doctest::Approx(want - shift).epsilon(1e-12));
  }

  // no QAM evidence at all degenerates to the uniform QAM message
  LlrVector v = LlrVector::Constant(16, 0.0);
  v.head(4) = kNegInf;
  const TruncMsg none = truncate(v, cfg, p);
  const TruncMsg u = vn_hidden_ems(none, cfg, p);
  REQUIRE(u.size() == 4);
  for (int k = 0; k < u.size(); ++k) CHECK(u.values[size_t(k)] == 0.0);
  CHECK(u.gamma == -std::numeric_limits<double>::infinity());
}

TEST_CASE("check step matches the unrolled best-first walk") {
  for (auto [base, phases, fb] : {std::tuple{2, 2, 11}, {3, 2, 45}}) {
    const RingParams p = make_ring_params(base, phases);
    const EmsConfig cfg{8, -4.0};
    Rng rng(uint64_t(31 * base + phases));
    int compared = 0;
    for (int t = 0; t < 60; ++t) {
      const TruncMsg q1 = truncate(random_llr(p.size(), rng), cfg, p);
      const TruncMsg q2 = truncate(random_llr(p.size(), rng), cfg, p);
      for (auto [w1, w2, wt] : {std::tuple{1, fb, 1}, {1, fb, fb}, {fb, 1, 1}}) {
        const WalkResult want = walk_oracle(q1, q2, w1, w2, wt, cfg, p);
        const TruncMsg got =
            cn_elementary(q1, q2, FilterIndex{w1}, FilterIndex{w2},
                          FilterIndex{wt}, cfg, p);
        check_invariants(got, cfg, p.size());
        if (want.capped || want.tied) continue;
        ++compared;
        REQUIRE(got.size() == want.msg.size());
        for (int k = 0; k < got.size(); ++k) {
          CHECK(got.symbols[size_t(k)] == want.msg.symbols[size_t(k)]);
          CHECK(got.values[size_t(k)] ==
                doctest::Approx(want.msg.values[size_t(k)]).epsilon(1e-12));
        }
      }
    }
    // the cap/tie escape hatch must not swallow the whole comparison
    CHECK(compared > 100);
  }
}

TEST_CASE("check step on flat lists is deterministic") {
  // flat QAM priors, unit weights: labels appear in seed order, so the
  // output is the XOR table's first column
  const RingParams p = make_ring_params(2, 2);
  const EmsConfig cfg{4, -4.0};
  LlrVector flat = LlrVector::Constant(16, kNegInf);
  flat.head(4).setZero();
  const TruncMsg q1 = truncate(flat, cfg, p);
  const TruncMsg q2 = truncate(flat, cfg, p);
  const TruncMsg out = cn_elementary(q1, q2, FilterIndex{1}, FilterIndex{1},
                                     FilterIndex{1}, cfg, p);
  REQUIRE(out.size() == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(out.values[size_t(k)] == 0.0);
    CHECK(out.symbols[size_t(k)] == k);
  }
  CHECK(out.gamma == doctest::Approx(0.0 - std::log(12.0) + 4.0));
}

TEST_CASE("degree-2 check relabels truncated messages exactly") {
  const RingParams p = make_ring_params(3, 2);
  const GroupTables tabs(p);
  const EmsConfig cfg{10, -4.0};
  Rng rng(17);
  const TruncMsg m = truncate(random_llr(81, rng), cfg, p);
  const WeightPerm w = make_weight_perm(FilterIndex{45}, p);
  const WeightPerm wt = make_weight_perm(FilterIndex{1}, p);
  const TruncMsg out = ems_passthrough(m, w, wt, cfg, tabs);
  REQUIRE(out.size() == m.size());
  for (int k = 0; k < m.size(); ++k) {
    CHECK(out.values[size_t(k)] == m.values[size_t(k)]);
    // out label solves w*b + t*a = 0 for the incoming symbol b
    const int32_t want = tabs.neg(w.fwd[size_t(m.symbols[size_t(k)])]);
    CHECK(out.symbols[size_t(k)] == want);
  }
  check_invariants(out, cfg, 81);
}

TEST_CASE("ems decoding recovers a clean frame") {
  const CodeConfig cfg =
      make_code_config(make_ring_params(2, 2), 3, 12, FilterIndex{11},
                       InputConstraint::kQam, 5, true);
  const ParityGraph graph = build_graph(cfg);
  const Eigen::ArrayXcd pts = constellation(cfg.ring);
  Rng rng(77);
  const std::vector<int32_t> s = random_info(cfg, rng);
  const std::vector<int32_t> x = encode(s, cfg);
  const ChannelParams ch{0.05};
  std::vector<LlrVector> f(x.size());
  for (size_t t = 0; t < x.size(); ++t) {
    f[t] = channel_llr(pts[x[size_t(t)]], pts, ch);
  }
  const auto [dec, diag] = ems_decode(f, graph, EmsConfig{16, -4.0}, 50);
  CHECK(dec == s);
  CHECK(diag.parity_ok);
}

TEST_CASE("ems decoding works at 256-ary with a truncated list") {
  const CodeConfig cfg =
      make_code_config(make_ring_params(4, 2), 2, 8, FilterIndex{224},
                       InputConstraint::kQam, 3, true);
  const ParityGraph graph = build_graph(cfg);
  const Eigen::ArrayXcd pts = constellation(cfg.ring);
  const ChannelParams ch{noise_var_from_snr_db(cfg.ring, 13.0)};
  Rng rng(21);
  int ok = 0;
  for (int fr = 0; fr < 5; ++fr) {
    const std::vector<int32_t> s = random_info(cfg, rng);
    const std::vector<int32_t> x = encode(s, cfg);
    const auto y = transmit(x, pts, ch, rng);
    std::vector<LlrVector> f(y.size());
    for (size_t t = 0; t < y.size(); ++t) f[t] = channel_llr(y[t], pts, ch);
    const auto [dec, diag] = ems_decode(f, graph, EmsConfig{64, std::numeric_limits<double>::quiet_NaN()}, 60);
    if (dec == s && diag.parity_ok) ++ok;
  }
  CHECK(ok >= 4);  // 13 dB is far above the waterfall for this code
}

TEST_CASE("ems decode validates its inputs") {
  const CodeConfig cfg =
      make_code_config(make_ring_params(2, 2), 2, 4, FilterIndex{11},
                       InputConstraint::kQam, 1, true);
  const ParityGraph graph = build_graph(cfg);
  std::vector<LlrVector> f(3, LlrVector::Zero(16));
  CHECK_THROWS_AS(ems_decode(f, graph, EmsConfig{16, -4.0}, 10), param_error);
  std::vector<LlrVector> g(size_t(graph.num_parity), LlrVector::Zero(16));
  CHECK_THROWS_AS(ems_decode(g, graph, EmsConfig{17, std::numeric_limits<double>::quiet_NaN()}, 10),
                  param_error);
}
