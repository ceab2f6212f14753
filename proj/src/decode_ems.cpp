#include "rasc/decode_ems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <queue>

#include "rasc/errors.hpp"

namespace rasc {

namespace {

struct Cand {
  double value;
  int32_t symbol;
};

// Sort descending by value, ties toward the lower symbol index, then drop
// duplicate symbols (keeping the larger value), truncate, shift the maximum
// to zero and refresh the compensation constant.
TruncMsg finalize(std::vector<Cand>& cands, const EmsConfig& cfg,
                  int32_t ring_size) {
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.symbol < b.symbol;
  });
  TruncMsg out;
  std::vector<uint8_t> seen(size_t(ring_size), 0);
  for (const Cand& c : cands) {
    if (int(out.values.size()) >= cfg.list_size) break;
    if (!std::isfinite(c.value)) break;  // sorted: the rest are -inf too
    if (seen[size_t(c.symbol)]) continue;
    seen[size_t(c.symbol)] = 1;
    out.values.push_back(c.value);
    out.symbols.push_back(c.symbol);
  }
  if (!out.values.empty() && out.values.front() != 0.0) {
    const double shift = out.values.front();
    for (double& v : out.values) v -= shift;
  }
  const int kept = int(out.values.size());
  if (kept > 0 && kept < ring_size) {
    out.gamma = out.values.back() - std::log(double(ring_size - kept)) - cfg.eta;
  } else {
    out.gamma = kNegInf;
  }
  return out;
}

double lookup_or_gamma(const TruncMsg& m, int32_t symbol) {
  for (size_t k = 0; k < m.symbols.size(); ++k) {
    if (m.symbols[k] == symbol) return m.values[k];
  }
  return m.gamma;
}

// Q = f + sum of R over every ring symbol, then retruncate. Only Q/R
// messages are truncated lists; the channel vector is indexable by
// construction and needs no list bookkeeping, so it stays dense and keeps
// the channel detail the lists have dropped. Absent list symbols read the
// compensation constant.
TruncMsg vn_with_channel(const LlrVector& f,
                         const std::vector<const TruncMsg*>& rs,
                         const EmsConfig& cfg, const RingParams& p) {
  const int32_t q = p.size();
  std::vector<double> val(static_cast<size_t>(q));
  for (int32_t s = 0; s < q; ++s) val[size_t(s)] = f[s];
  std::vector<double> dense(static_cast<size_t>(q));
  for (const TruncMsg* r : rs) {
    std::fill(dense.begin(), dense.end(), r->gamma);
    for (size_t k = 0; k < r->symbols.size(); ++k) {
      dense[size_t(r->symbols[k])] = r->values[k];
    }
    for (int32_t s = 0; s < q; ++s) val[size_t(s)] += dense[size_t(s)];
  }
  std::vector<Cand> cands;
  cands.reserve(size_t(q));
  for (int32_t s = 0; s < q; ++s) {
    if (std::isfinite(val[size_t(s)])) cands.push_back({val[size_t(s)], s});
  }
  return finalize(cands, cfg, q);
}

}  // namespace

EmsConfig resolve_ems_config(int list_size, double eta, const RingParams& p) {
  if (list_size < 1 || list_size > p.size()) {
    throw param_error("list size must be in [1, ring size]");
  }
  if (std::isnan(eta)) {
    switch (list_size) {
      case 20: eta = -3.0; break;
      case 40: eta = -3.5; break;
      case 64: eta = -4.7; break;
      case 128: eta = -5.5; break;
      default:
        throw param_error("no default offset for list size " +
                          std::to_string(list_size) + "; pass eta explicitly");
    }
  }
  return EmsConfig{list_size, eta};
}

TruncMsg truncate(const LlrVector& v, const EmsConfig& cfg,
                  const RingParams& p) {
  const int32_t q = p.size();
  if (v.size() != q) throw param_error("truncate: length mismatch");
  std::vector<Cand> cands;
  cands.reserve(size_t(q));
  for (int32_t i = 0; i < q; ++i) {
    if (std::isfinite(v[i])) cands.push_back({v[i], i});
  }
  return finalize(cands, cfg, q);
}

TruncMsg vn_elementary(const TruncMsg& r1, const TruncMsg& r2,
                       const EmsConfig& cfg, const RingParams& p) {
  std::vector<Cand> cands;
  cands.reserve(r1.symbols.size() + r2.symbols.size());
  for (size_t k = 0; k < r1.symbols.size(); ++k) {
    cands.push_back({r1.values[k] + lookup_or_gamma(r2, r1.symbols[k]),
                     r1.symbols[k]});
  }
  for (size_t k = 0; k < r2.symbols.size(); ++k) {
    cands.push_back({r1.gamma + r2.values[k], r2.symbols[k]});
  }
  return finalize(cands, cfg, p.size());
}

// Restrict to the QAM sublattice. Every QAM symbol must survive with some
// value: kept entries keep theirs, absent ones get the compensation gamma'
// anchored at the last kept QAM position. Dropping absent QAM symbols
// instead can yield an empty message, and emptiness is absorbing across
// node updates (it reads as all -inf downstream), which collapses whole
// frames at moderate SNR.
TruncMsg vn_hidden_ems(const TruncMsg& t, const EmsConfig& cfg,
                       const RingParams& p) {
  const int32_t qam = p.qam_size();
  std::vector<Cand> cands;
  cands.reserve(size_t(qam));
  std::vector<uint8_t> present(size_t(qam), 0);
  int lz = -1;
  for (size_t k = 0; k < t.symbols.size(); ++k) {
    if (t.symbols[k] < qam) {
      cands.push_back({t.values[k], t.symbols[k]});
      present[size_t(t.symbols[k])] = 1;
      lz = int(k);
    }
  }
  if (lz < 0) {
    // no surviving QAM evidence: a uniform QAM message carries exactly
    // that information
    TruncMsg out;
    const int32_t n = std::min<int32_t>(qam, cfg.list_size);
    for (int32_t s = 0; s < n; ++s) {
      out.values.push_back(0.0);
      out.symbols.push_back(s);
    }
    out.gamma = kNegInf;
    return out;
  }
  const double gp = t.values[size_t(lz)] -
                    std::log(double(p.size() - lz)) - cfg.eta;
  for (int32_t s = 0; s < qam; ++s) {
    if (!present[size_t(s)]) cands.push_back({gp, s});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.symbol < b.symbol;
  });
  TruncMsg out;
  const int keep = std::min<int>(int(cands.size()), cfg.list_size);
  for (int k = 0; k < keep; ++k) {
    out.values.push_back(cands[size_t(k)].value);
    out.symbols.push_back(cands[size_t(k)].symbol);
  }
  const double shift = out.values.front();
  if (shift != 0.0) {
    for (double& v : out.values) v -= shift;
  }
  out.gamma = kNegInf;
  return out;
}

TruncMsg cn_elementary(const TruncMsg& q1, const WeightPerm& w1,
                       const TruncMsg& q2, const WeightPerm& w2,
                       const WeightPerm& target, const EmsConfig& cfg,
                       const GroupTables& tables, const EmsConfig& out_cfg) {
  (void)cfg;
  const int n1 = q1.size();
  const int n2 = q2.size();
  TruncMsg out;
  if (n1 == 0 || n2 == 0) return out;

  std::vector<int32_t> s1(static_cast<size_t>(n1));
  std::vector<int32_t> s2(static_cast<size_t>(n2));
  for (int k = 0; k < n1; ++k) {
    s1[size_t(k)] = w1.identity ? q1.symbols[size_t(k)] : w1.fwd[size_t(q1.symbols[size_t(k)])];
  }
  for (int k = 0; k < n2; ++k) {
    s2[size_t(k)] = w2.identity ? q2.symbols[size_t(k)] : w2.fwd[size_t(q2.symbols[size_t(k)])];
  }
  auto out_label = [&](int i, int j) {
    const int32_t sum = tables.add(s1[size_t(i)], s2[size_t(j)]);
    const int32_t n = tables.neg(sum);
    return target.identity ? n : target.inv[size_t(n)];
  };

  struct Cell {
    double value;
    uint32_t seq;
    int32_t i, j;
  };
  struct Cmp {
    bool operator()(const Cell& a, const Cell& b) const {
      if (a.value != b.value) return a.value < b.value;
      return a.seq > b.seq;  // FIFO among equal values
    }
  };
  std::priority_queue<Cell, std::vector<Cell>, Cmp> sorter;
  uint32_t seq = 0;
  for (int i = 0; i < n1; ++i) {
    sorter.push({q1.values[size_t(i)] + q2.values[0], seq++, i, 0});
  }
  std::vector<uint8_t> seen(size_t(tables.q), 0);
  const int nm = out_cfg.list_size;
  int extractions = 0;
  while (!sorter.empty() && int(out.values.size()) < nm &&
         extractions < 2 * nm) {
    const Cell c = sorter.top();
    sorter.pop();
    ++extractions;
    const int32_t sym = out_label(c.i, c.j);
    if (!seen[size_t(sym)]) {
      seen[size_t(sym)] = 1;
      out.values.push_back(c.value);
      out.symbols.push_back(sym);
    }
    if (c.j + 1 < n2) {
      sorter.push({q1.values[size_t(c.i)] + q2.values[size_t(c.j) + 1], seq++, c.i, c.j + 1});
    }
  }
  // extraction cap reached: pad from what the sorter already holds, in
  // extraction order, without growing it
  while (!sorter.empty() && int(out.values.size()) < nm) {
    const Cell c = sorter.top();
    sorter.pop();
    const int32_t sym = out_label(c.i, c.j);
    if (!seen[size_t(sym)]) {
      seen[size_t(sym)] = 1;
      out.values.push_back(c.value);
      out.symbols.push_back(sym);
    }
  }
  const double shift = out.values.front();
  if (shift != 0.0) {
    for (double& v : out.values) v -= shift;
  }
  const int kept = int(out.values.size());
  out.gamma = (kept < tables.q)
                  ? out.values.back() - std::log(double(tables.q - kept)) - out_cfg.eta
                  : kNegInf;
  return out;
}

TruncMsg cn_elementary(const TruncMsg& q1, const TruncMsg& q2, FilterIndex w1,
                       FilterIndex w2, FilterIndex target,
                       const EmsConfig& cfg, const RingParams& p) {
  const GroupTables tables(p);
  const WeightPerm p1 = make_weight_perm(w1, p);
  const WeightPerm p2 = make_weight_perm(w2, p);
  const WeightPerm pt = make_weight_perm(target, p);
  return cn_elementary(q1, p1, q2, p2, pt, cfg, tables, cfg);
}

TruncMsg ems_passthrough(const TruncMsg& m, const WeightPerm& w,
                         const WeightPerm& target, const EmsConfig& cfg,
                         const GroupTables& tables) {
  (void)cfg;
  TruncMsg out;
  out.values = m.values;
  out.symbols.resize(m.symbols.size());
  for (size_t k = 0; k < m.symbols.size(); ++k) {
    const int32_t ws = w.identity ? m.symbols[k] : w.fwd[size_t(m.symbols[k])];
    const int32_t n = tables.neg(ws);
    out.symbols[k] = target.identity ? n : target.inv[size_t(n)];
  }
  // a pure relabel: the absent-symbol compensation is label-symmetric, so
  // it passes through unchanged (recomputing it would resurrect symbols a
  // restricted input has ruled out)
  out.gamma = m.gamma;
  if (!out.values.empty() && out.values.front() != 0.0) {
    const double shift = out.values.front();
    for (double& v : out.values) v -= shift;
    out.gamma -= shift;
  }
  return out;
}

std::pair<std::vector<int32_t>, DecodeDiagnostics> ems_decode(
    const std::vector<LlrVector>& parity_llrs, const ParityGraph& graph,
    const EmsConfig& cfg_in, int max_iters) {
  const CodeConfig& code = graph.cfg;
  const RingParams& p = code.ring;
  const EmsConfig cfg = resolve_ems_config(cfg_in.list_size, cfg_in.eta, p);
  if (int32_t(parity_llrs.size()) != graph.num_parity) {
    throw param_error("ems_decode: one channel LLR vector per parity symbol required");
  }
  const GroupTables tables(p);
  const WeightPerm unit = make_weight_perm(FilterIndex{1}, p);
  const WeightPerm gperm = make_weight_perm(code.filter, p);
  const int32_t q = p.size();
  const int32_t qam = p.qam_size();
  const bool restrict_info = code.constraint == InputConstraint::kQam;

  std::vector<TruncMsg> tf(size_t(graph.num_parity));
  for (int32_t t = 0; t < graph.num_parity; ++t) {
    tf[size_t(t)] = truncate(parity_llrs[size_t(t)], cfg, p);
  }
  LlrVector flat = LlrVector::Constant(q, restrict_info ? kNegInf : 0.0);
  if (restrict_info) flat.head(qam).setZero();
  const TruncMsg info_prior = truncate(flat, cfg, p);

  const int32_t ne = int32_t(graph.edges.size());
  std::vector<TruncMsg> msg_q(static_cast<size_t>(ne));
  std::vector<TruncMsg> msg_r(static_cast<size_t>(ne));

  auto weight_of = [&](int32_t e) -> const WeightPerm& {
    return graph.edges[size_t(e)].weighted ? gperm : unit;
  };

  std::vector<int32_t> decision(size_t(graph.num_vars()), 0);
  auto syndrome_ok = [&]() {
    for (int32_t c = 0; c < graph.num_checks(); ++c) {
      int32_t acc = 0;
      for (int32_t e = graph.check_offsets[size_t(c)]; e < graph.check_offsets[size_t(c) + 1]; ++e) {
        int32_t u = decision[size_t(graph.edges[size_t(e)].var)];
        if (graph.edges[size_t(e)].weighted) u = gperm.fwd[size_t(u)];
        acc = tables.add(acc, u);
      }
      if (acc != 0) return false;
    }
    return true;
  };

  auto syndrome_violations = [&]() {
    int viol = 0;
    for (int32_t c = 0; c < graph.num_checks(); ++c) {
      int32_t acc = 0;
      for (int32_t e = graph.check_offsets[size_t(c)]; e < graph.check_offsets[size_t(c) + 1]; ++e) {
        int32_t u = decision[size_t(graph.edges[size_t(e)].var)];
        if (graph.edges[size_t(e)].weighted) u = gperm.fwd[size_t(u)];
        acc = tables.add(acc, u);
      }
      if (acc != 0) ++viol;
    }
    return viol;
  };
  const bool trace = std::getenv("RASC_EMS_TRACE") != nullptr;

  DecodeDiagnostics diag;
  std::vector<const TruncMsg*> ins;
  for (int iter = 1; iter <= max_iters; ++iter) {
    // variable-node phase
    for (int32_t v = 0; v < graph.num_vars(); ++v) {
      const int32_t lo = graph.var_offsets[size_t(v)];
      const int32_t hi = graph.var_offsets[size_t(v) + 1];
      const bool hidden = v < graph.num_info;
      for (int32_t k = lo; k < hi; ++k) {
        const int32_t e = graph.var_edges[size_t(k)];
        if (iter == 1) {
          msg_q[size_t(e)] = hidden ? info_prior : tf[size_t(v - graph.num_info)];
          continue;
        }
        if (!hidden) {
          ins.clear();
          for (int32_t k2 = lo; k2 < hi; ++k2) {
            if (k2 == k) continue;
            ins.push_back(&msg_r[size_t(graph.var_edges[size_t(k2)])]);
          }
          msg_q[size_t(e)] = vn_with_channel(
              parity_llrs[size_t(v - graph.num_info)], ins, cfg, p);
          continue;
        }
        TruncMsg acc;
        bool has = false;
        for (int32_t k2 = lo; k2 < hi; ++k2) {
          if (k2 == k) continue;
          const TruncMsg& r = msg_r[size_t(graph.var_edges[size_t(k2)])];
          acc = has ? vn_elementary(acc, r, cfg, p) : r;
          has = true;
        }
        if (restrict_info) acc = vn_hidden_ems(acc, cfg, p);
        msg_q[size_t(e)] = std::move(acc);
      }
    }
    // check-node phase
    for (int32_t c = 0; c < graph.num_checks(); ++c) {
      const int32_t lo = graph.check_offsets[size_t(c)];
      const int32_t hi = graph.check_offsets[size_t(c) + 1];
      const int32_t deg = hi - lo;
      for (int32_t e = lo; e < hi; ++e) {
        const WeightPerm& wt = weight_of(e);
        if (deg == 2) {
          const int32_t o = (e == lo) ? lo + 1 : lo;
          msg_r[size_t(e)] = ems_passthrough(msg_q[size_t(o)], weight_of(o), wt, cfg, tables);
        } else {
          int32_t o1 = lo, o2 = lo + 1;
          if (e == lo) {
            o1 = lo + 1;
            o2 = lo + 2;
          } else if (e == lo + 1) {
            o2 = lo + 2;
          }
          msg_r[size_t(e)] = cn_elementary(msg_q[size_t(o1)], weight_of(o1),
                                           msg_q[size_t(o2)], weight_of(o2),
                                           wt, cfg, tables, cfg);
        }
      }
    }
    // tentative decision and early stop: dense posterior, no intermediate
    // truncation (hidden nodes use the flat restricted prior as their
    // channel term)
    int changes = 0;
    for (int32_t v = 0; v < graph.num_vars(); ++v) {
      const int32_t lo = graph.var_offsets[size_t(v)];
      const int32_t hi = graph.var_offsets[size_t(v) + 1];
      const bool hidden = v < graph.num_info;
      ins.clear();
      for (int32_t k = lo; k < hi; ++k) {
        ins.push_back(&msg_r[size_t(graph.var_edges[size_t(k)])]);
      }
      const TruncMsg acc = vn_with_channel(
          hidden ? flat : parity_llrs[size_t(v - graph.num_info)], ins, cfg, p);
      const int32_t before = decision[size_t(v)];
      decision[size_t(v)] = acc.symbols.empty() ? 0 : acc.symbols[0];
      if (decision[size_t(v)] != before) ++changes;
    }
    diag.symbol_changes.push_back(changes);
    diag.iterations = iter;
    if (trace) {
      std::fprintf(stderr, "it=%d changes=%d viol=%d\n", iter, changes,
                   syndrome_violations());
    }
    if (syndrome_ok()) {
      diag.parity_ok = true;
      break;
    }
  }

  std::vector<int32_t> info(decision.begin(), decision.begin() + graph.num_info);
  return {std::move(info), std::move(diag)};
}

}  // namespace rasc
