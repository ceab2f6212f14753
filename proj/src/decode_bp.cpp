#include "rasc/decode_bp.hpp"

#include <cmath>

#include "rasc/errors.hpp"

namespace rasc {

WeightPerm make_weight_perm(FilterIndex g, const RingParams& p) {
  WeightPerm w;
  w.fwd = mul_permutation(g, p);
  w.inv.resize(w.fwd.size());
  w.identity = true;
  for (int32_t i = 0; i < int32_t(w.fwd.size()); ++i) {
    w.inv[size_t(w.fwd[size_t(i)])] = i;
    if (w.fwd[size_t(i)] != i) w.identity = false;
  }
  return w;
}

void wht(Eigen::ArrayXd& a) {
  const Eigen::Index n = a.size();
  for (Eigen::Index h = 1; h < n; h *= 2) {
    for (Eigen::Index s = 0; s < n; s += 2 * h) {
      for (Eigen::Index i = s; i < s + h; ++i) {
        const double x = a[i];
        const double y = a[i + h];
        a[i] = x + y;
        a[i + h] = x - y;
      }
    }
  }
}

void dft4(Eigen::ArrayXcd& a, bool inverse) {
  using C = std::complex<double>;
  const Eigen::Index n = a.size();
  for (Eigen::Index h = 1; h < n; h *= 4) {
    for (Eigen::Index s = 0; s < n; s += 4 * h) {
      for (Eigen::Index i = s; i < s + h; ++i) {
        const C x0 = a[i], x1 = a[i + h], x2 = a[i + 2 * h], x3 = a[i + 3 * h];
        const C s02 = x0 + x2, d02 = x0 - x2;
        const C s13 = x1 + x3, d13 = x1 - x3;
        // forward twiddle -i*d13; inverse conjugates it
        C jd{d13.imag(), -d13.real()};
        if (inverse) jd = -jd;
        a[i] = s02 + s13;
        a[i + h] = d02 + jd;
        a[i + 2 * h] = s02 - s13;
        a[i + 3 * h] = d02 - jd;
      }
    }
  }
  if (inverse) a /= double(n);
}

LlrVector vn_update(const LlrVector& f,
                    const std::vector<const LlrVector*>& incoming, bool hidden,
                    InputConstraint constraint, const RingParams& p) {
  const int32_t q = p.size();
  if (f.size() != q) throw param_error("vn_update: length mismatch");
  LlrVector out = f;
  for (const LlrVector* m : incoming) {
    if (m->size() != q) throw param_error("vn_update: length mismatch");
    out += *m;
  }
  if (hidden && constraint == InputConstraint::kQam) {
    out.tail(q - p.qam_size()).setConstant(kNegInf);
  }
  normalize_max0(out);
  return out;
}

CheckCombiner::CheckCombiner(const RingParams& p, FilterIndex g,
                             CheckMethod method)
    : tables_(p),
      unit_(make_weight_perm(FilterIndex{1}, p)),
      gperm_(make_weight_perm(g, p)) {
  fast_ = method == CheckMethod::kFft && (p.base == 2 || p.base == 4);
  const int32_t q = tables_.q;
  p1_.resize(q);
  p2_.resize(q);
  conv_.resize(q);
  if (fast_ && p.base == 4) {
    c1_.resize(q);
    c2_.resize(q);
  }
}

void CheckCombiner::load_prob(const LlrVector& m, const WeightPerm& w,
                              Eigen::ArrayXd& dst) const {
  // exp underflows to an exact zero well before this; the guard keeps -inf
  // (masked symbols) and extreme tails out of exp, where they would drag
  // the whole vector through slow non-finite and denormal paths
  constexpr double kExpZero = -700.0;
  const double mx = m.maxCoeff();
  const int32_t q = tables_.q;
  // relabel x -> w*x on the index axis: the relabeled belief at u comes
  // from the original symbol w^-1 * u
  for (int32_t u = 0; u < q; ++u) {
    const double d = (w.identity ? m[u] : m[w.inv[size_t(u)]]) - mx;
    dst[u] = d < kExpZero ? 0.0 : std::exp(d);
  }
}

void CheckCombiner::combine(const LlrVector& m1, const WeightPerm& w1,
                            const LlrVector& m2, const WeightPerm& w2,
                            const WeightPerm& target, LlrVector& out) {
  const int32_t q = tables_.q;
  load_prob(m1, w1, p1_);
  load_prob(m2, w2, p2_);
  if (!fast_) {
    conv_.setZero();
    if (!tables_.add_table.empty()) {
      const int32_t* rows = tables_.add_table.data();
      for (int32_t u = 0; u < q; ++u) {
        const double a = p1_[u];
        if (a == 0.0) continue;
        const int32_t* row = rows + size_t(u) * size_t(q);
        for (int32_t v = 0; v < q; ++v) conv_[row[v]] += a * p2_[v];
      }
    } else {
      for (int32_t u = 0; u < q; ++u) {
        const double a = p1_[u];
        if (a == 0.0) continue;
        for (int32_t v = 0; v < q; ++v) conv_[tables_.add(u, v)] += a * p2_[v];
      }
    }
  } else if (tables_.params.base == 2) {
    wht(p1_);
    wht(p2_);
    conv_ = p1_ * p2_;
    wht(conv_);
    conv_ /= double(q);
  } else {
    c1_ = p1_.cast<std::complex<double>>();
    c2_ = p2_.cast<std::complex<double>>();
    dft4(c1_, false);
    dft4(c2_, false);
    c1_ *= c2_;
    dft4(c1_, true);
    conv_ = c1_.real();
  }
  out.resize(q);
  // configurations satisfy w1*v1 + w2*v2 + target*a = 0, so the belief over
  // target value a sits at convolution entry neg(target*a)
  for (int32_t i = 0; i < q; ++i) {
    const int32_t t = target.identity ? i : target.fwd[size_t(i)];
    out[i] = conv_[tables_.neg(t)];
  }
  out = out.max(kProbFloor).log();
  normalize_max0(out);
}

void CheckCombiner::passthrough(const LlrVector& m, const WeightPerm& w,
                                const WeightPerm& target,
                                LlrVector& out) const {
  const int32_t q = tables_.q;
  out.resize(q);
  for (int32_t i = 0; i < q; ++i) {
    const int32_t t = target.identity ? i : target.fwd[size_t(i)];
    const int32_t u = tables_.neg(t);
    out[i] = m[w.identity ? u : w.inv[size_t(u)]];
  }
  normalize_max0(out);
}

namespace {

LlrVector cn_dispatch(const std::vector<WeightedLlr>& incoming,
                      FilterIndex target, const RingParams& p,
                      CheckMethod method) {
  if (incoming.empty() || incoming.size() > 2) {
    throw param_error("check update supports 1 or 2 incoming messages");
  }
  CheckCombiner cc(p, FilterIndex{1}, method);
  const WeightPerm wt = make_weight_perm(target, p);
  const WeightPerm wa = make_weight_perm(incoming[0].second, p);
  LlrVector out;
  if (incoming.size() == 1) {
    cc.passthrough(*incoming[0].first, wa, wt, out);
  } else {
    const WeightPerm wb = make_weight_perm(incoming[1].second, p);
    cc.combine(*incoming[0].first, wa, *incoming[1].first, wb, wt, out);
  }
  return out;
}

}  // namespace

LlrVector cn_update_full(const std::vector<WeightedLlr>& incoming,
                         FilterIndex target, const RingParams& p) {
  return cn_dispatch(incoming, target, p, CheckMethod::kFull);
}

LlrVector cn_update_fft(const std::vector<WeightedLlr>& incoming,
                        FilterIndex target, const RingParams& p) {
  return cn_dispatch(incoming, target, p, CheckMethod::kFft);
}

std::pair<std::vector<int32_t>, DecodeDiagnostics> decode(
    const std::vector<LlrVector>& parity_llrs, const ParityGraph& graph,
    int max_iters, CheckMethod method) {
  const CodeConfig& cfg = graph.cfg;
  const RingParams& p = cfg.ring;
  const int32_t q = p.size();
  if (int32_t(parity_llrs.size()) != graph.num_parity) {
    throw param_error("decode: one channel LLR vector per parity symbol required");
  }
  for (const LlrVector& f : parity_llrs) {
    if (f.size() != q) throw param_error("decode: LLR length mismatch");
  }
  CheckCombiner cc(p, cfg.filter, method);
  const GroupTables& tab = cc.tables();
  const int32_t ne = int32_t(graph.edges.size());
  const int32_t nv = graph.num_vars();
  const int32_t nchk = graph.num_checks();
  const int32_t qam = p.qam_size();
  const bool restrict_info = cfg.constraint == InputConstraint::kQam;

  std::vector<LlrVector> msg_q(size_t(ne), LlrVector::Zero(q));
  std::vector<LlrVector> msg_r(size_t(ne), LlrVector::Zero(q));
  const LlrVector zero = LlrVector::Zero(q);
  auto f_of = [&](int32_t v) -> const LlrVector& {
    return v < graph.num_info ? zero : parity_llrs[size_t(v - graph.num_info)];
  };

  LlrVector app(q);
  std::vector<int32_t> decision(static_cast<size_t>(nv));
  auto decide = [&](int32_t v, const LlrVector& b) {
    const int32_t limit = (v < graph.num_info && restrict_info) ? qam : q;
    decision[size_t(v)] = argmax_lowest(b, limit);
  };
  for (int32_t v = 0; v < nv; ++v) decide(v, f_of(v));

  auto syndrome_ok = [&]() {
    for (int32_t c = 0; c < nchk; ++c) {
      int32_t acc = 0;
      for (int32_t e = graph.check_offsets[size_t(c)]; e < graph.check_offsets[size_t(c) + 1]; ++e) {
        int32_t u = decision[size_t(graph.edges[size_t(e)].var)];
        if (graph.edges[size_t(e)].weighted) u = cc.gperm().fwd[size_t(u)];
        acc = tab.add(acc, u);
      }
      if (acc != 0) return false;
    }
    return true;
  };

  DecodeDiagnostics diag;
  LlrVector sum(q);
  for (int iter = 1; iter <= max_iters; ++iter) {
    // variable-node phase
    for (int32_t v = 0; v < nv; ++v) {
      const int32_t lo = graph.var_offsets[size_t(v)];
      const int32_t hi = graph.var_offsets[size_t(v) + 1];
      const bool hidden = v < graph.num_info;
      if (!hidden) {
        // parity degree <= 2: direct sums (check messages from degree-2
        // checks can carry -inf entries, so no subtraction shortcut here)
        for (int32_t k = lo; k < hi; ++k) {
          const int32_t e = graph.var_edges[size_t(k)];
          LlrVector& out = msg_q[size_t(e)];
          out = f_of(v);
          for (int32_t k2 = lo; k2 < hi; ++k2) {
            if (k2 == k) continue;
            out += msg_r[size_t(graph.var_edges[size_t(k2)])];
          }
          normalize_max0(out);
        }
        continue;
      }
      // info nodes: messages toward them come from full convolutions and
      // are finite, so the exclusive sum can be formed by subtraction
      sum.setZero();
      for (int32_t k = lo; k < hi; ++k) sum += msg_r[size_t(graph.var_edges[size_t(k)])];
      for (int32_t k = lo; k < hi; ++k) {
        const int32_t e = graph.var_edges[size_t(k)];
        LlrVector& out = msg_q[size_t(e)];
        out = sum - msg_r[size_t(e)];
        if (restrict_info) out.tail(q - qam).setConstant(kNegInf);
        normalize_max0(out);
      }
    }
    // check-node phase
    for (int32_t c = 0; c < nchk; ++c) {
      const int32_t lo = graph.check_offsets[size_t(c)];
      const int32_t hi = graph.check_offsets[size_t(c) + 1];
      const int32_t deg = hi - lo;
      for (int32_t e = lo; e < hi; ++e) {
        const WeightPerm& wt = graph.edges[size_t(e)].weighted ? cc.gperm() : cc.unit();
        if (deg == 2) {
          const int32_t o = (e == lo) ? lo + 1 : lo;
          const WeightPerm& wo = graph.edges[size_t(o)].weighted ? cc.gperm() : cc.unit();
          cc.passthrough(msg_q[size_t(o)], wo, wt, msg_r[size_t(e)]);
        } else {
          int32_t o1 = lo, o2 = lo + 1;
          if (e == lo) {
            o1 = lo + 1;
            o2 = lo + 2;
          } else if (e == lo + 1) {
            o2 = lo + 2;
          }
          const WeightPerm& w1 = graph.edges[size_t(o1)].weighted ? cc.gperm() : cc.unit();
          const WeightPerm& w2 = graph.edges[size_t(o2)].weighted ? cc.gperm() : cc.unit();
          cc.combine(msg_q[size_t(o1)], w1, msg_q[size_t(o2)], w2, wt, msg_r[size_t(e)]);
        }
      }
    }
    // tentative decision and early stop
    int changes = 0;
    for (int32_t v = 0; v < nv; ++v) {
      app = f_of(v);
      for (int32_t k = graph.var_offsets[size_t(v)]; k < graph.var_offsets[size_t(v) + 1]; ++k) {
        app += msg_r[size_t(graph.var_edges[size_t(k)])];
      }
      const int32_t before = decision[size_t(v)];
      decide(v, app);
      if (decision[size_t(v)] != before) ++changes;
    }
    diag.symbol_changes.push_back(changes);
    diag.iterations = iter;
    if (syndrome_ok()) {
      diag.parity_ok = true;
      break;
    }
  }

  std::vector<int32_t> info(decision.begin(), decision.begin() + graph.num_info);
  return {std::move(info), std::move(diag)};
}

}  // namespace rasc
