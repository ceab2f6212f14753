#include "rasc/ring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace rasc {

namespace {

void check_same_params(const RingParams& a, const RingParams& b,
                       const char* op) {
  if (!(a == b)) {
    throw param_error(std::string(op) + ": operands have mismatched ring parameters");
  }
}

// In the monomial view the element is sum_k d_k w^k with k in [0, 2*phases):
// d_k = v_k^I for k < phases and d_k = v_{k-phases}^Q for k >= phases
// (multiplying by j = w^phases moves the Q coefficients up).
void to_monomial(const RingElement& e, int* d) {
  const int ph = e.params.phases;
  for (int k = 0; k < ph; ++k) {
    d[k] = e.c[2 * k];
    d[k + ph] = e.c[2 * k + 1];
  }
}

RingElement from_monomial(const int* d, const RingParams& p) {
  RingElement r{p, {}};
  const int ph = p.phases;
  const int base = p.base;
  for (int k = 0; k < ph; ++k) {
    r.c[2 * k] = int8_t(((d[k] % base) + base) % base);
    r.c[2 * k + 1] = int8_t(((d[k + ph] % base) + base) % base);
  }
  return r;
}

// gcd of g(w) and w^dim + 1 over F_p; unit test for the quotient ring.
// Coefficients low-order first.
bool coprime_to_modulus(std::vector<int> g, int dim, int p) {
  auto deg = [](const std::vector<int>& f) {
    for (int i = int(f.size()) - 1; i >= 0; --i)
      if (f[i] != 0) return i;
    return -1;
  };
  std::vector<int> a(size_t(dim) + 1, 0);
  a[0] = 1;
  a[size_t(dim)] = 1;  // w^dim + 1
  for (int& c : g) c = ((c % p) + p) % p;
  std::vector<int> b = std::move(g);
  // inverses mod 2 and mod 3: inv(1)=1, inv(2)=2 (mod 3)
  auto inv = [p](int x) { return (p == 3 && x == 2) ? 2 : 1; };
  while (true) {
    const int db = deg(b);
    if (db < 0) return deg(a) == 0;
    if (db == 0) return true;
    const int da = deg(a);
    if (da < db) {
      std::swap(a, b);
      continue;
    }
    const int f = (a[size_t(da)] * inv(b[size_t(db)])) % p;
    const int shift = da - db;
    for (int i = 0; i <= db; ++i) {
      a[size_t(i + shift)] = ((a[size_t(i + shift)] - f * b[size_t(i)]) % p + p) % p;
    }
  }
}

}  // namespace

RingParams make_ring_params(int base, int phases) {
  if (base < 2 || base > 4) throw param_error("ring base must be 2, 3 or 4");
  if (phases < 1 || phases > 4) throw param_error("phase count must be in [1,4]");
  return RingParams{base, phases};
}

int32_t index_of(const RingElement& e) {
  int32_t idx = 0;
  for (int k = e.params.dim() - 1; k >= 0; --k) {
    idx = idx * e.params.base + e.c[size_t(k)];
  }
  return idx;
}

RingElement element_of(int32_t index, const RingParams& p) {
  if (index < 0 || index >= p.size()) throw param_error("ring index out of range");
  RingElement e{p, {}};
  for (int k = 0; k < p.dim(); ++k) {
    e.c[size_t(k)] = int8_t(index % p.base);
    index /= p.base;
  }
  return e;
}

RingElement add(const RingElement& a, const RingElement& b) {
  check_same_params(a.params, b.params, "add");
  RingElement r{a.params, {}};
  for (int k = 0; k < a.params.dim(); ++k) {
    r.c[size_t(k)] = int8_t((a.c[size_t(k)] + b.c[size_t(k)]) % a.params.base);
  }
  return r;
}

RingElement neg(const RingElement& a) {
  RingElement r{a.params, {}};
  for (int k = 0; k < a.params.dim(); ++k) {
    r.c[size_t(k)] = int8_t((a.params.base - a.c[size_t(k)]) % a.params.base);
  }
  return r;
}

RingElement mul(const RingElement& a, const RingElement& b) {
  check_same_params(a.params, b.params, "mul");
  const int dim = a.params.dim();
  int da[kMaxRingDim], db[kMaxRingDim], acc[kMaxRingDim] = {};
  to_monomial(a, da);
  to_monomial(b, db);
  // negacyclic convolution: w^dim = -1
  for (int i = 0; i < dim; ++i) {
    if (da[i] == 0) continue;
    for (int k = 0; k < dim; ++k) {
      int m = i + k;
      int s = da[i] * db[k];
      if (m >= dim) {
        m -= dim;
        s = -s;
      }
      acc[m] += s;
    }
  }
  return from_monomial(acc, a.params);
}

RingElement conjugate(const RingElement& a) {
  const int dim = a.params.dim();
  int d[kMaxRingDim], dc[kMaxRingDim];
  to_monomial(a, d);
  // conj(w^k) = w^{-k} = -w^{dim-k} for k >= 1
  dc[0] = d[0];
  for (int k = 1; k < dim; ++k) dc[dim - k] = -d[k];
  return from_monomial(dc, a.params);
}

std::complex<double> embed(const RingElement& e) {
  const int ph = e.params.phases;
  std::complex<double> z{0.0, 0.0};
  for (int i = 0; i < ph; ++i) {
    const double ang = M_PI * double(i) / double(2 * ph);
    const std::complex<double> w{std::cos(ang), std::sin(ang)};
    z += std::complex<double>(double(e.c[size_t(2 * i)]), double(e.c[size_t(2 * i + 1)])) * w;
  }
  return z;
}

std::complex<double> center_offset(const RingParams& p) {
  std::complex<double> s{0.0, 0.0};
  for (int i = 0; i < p.phases; ++i) {
    const double ang = M_PI * double(i) / double(2 * p.phases);
    s += std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return 0.5 * double(p.base - 1) * std::complex<double>(1.0, 1.0) * s;
}

std::complex<double> embed_centered(const RingElement& e) {
  return embed(e) - center_offset(e.params);
}

double avg_power(const RingParams& p) {
  return double(p.phases) * double(p.base * p.base - 1) / 6.0;
}

bool is_bijective(FilterIndex g, const RingParams& p) {
  if (g.value < 0 || g.value >= p.size()) throw param_error("filter index out of range");
  const RingElement e = element_of(g.value, p);
  int d[kMaxRingDim];
  to_monomial(e, d);
  std::vector<int> poly(d, d + p.dim());
  // Multiplication by g permutes the ring iff g is a unit, i.e. g(w) is
  // coprime to w^dim + 1 modulo every prime dividing base (2 -> {2},
  // 3 -> {3}, 4 -> {2}: units mod 4 are exactly the units mod 2).
  const int prime = (p.base == 3) ? 3 : 2;
  return coprime_to_modulus(poly, p.dim(), prime);
}

std::vector<int32_t> mul_permutation(FilterIndex g, const RingParams& p) {
  const int32_t q = p.size();
  if (g.value < 0 || g.value >= q) throw param_error("filter index out of range");
  const RingElement ge = element_of(g.value, p);
  std::vector<int32_t> perm(static_cast<size_t>(q));
  std::vector<uint8_t> seen(size_t(q), 0);
  bool bij = true;
  for (int32_t i = 0; i < q; ++i) {
    const int32_t img = index_of(mul(ge, element_of(i, p)));
    perm[size_t(i)] = img;
    if (seen[size_t(img)]) bij = false;
    seen[size_t(img)] = 1;
  }
  if (!bij) {
    throw filter_error("filter " + std::to_string(g.value) + " is not bijective");
  }
  return perm;
}

std::vector<int32_t> bijective_filters(const RingParams& p) {
  std::vector<int32_t> out;
  for (int32_t g = 0; g < p.size(); ++g) {
    if (is_bijective(FilterIndex{g}, p)) out.push_back(g);
  }
  return out;
}

std::string filter_taps(FilterIndex g, const RingParams& p) {
  const RingElement e = element_of(g.value, p);
  std::ostringstream os;
  for (int i = 0; i < p.phases; ++i) {
    if (i) os << ',';
    os << '(' << int(e.c[size_t(2 * i)]) << ',' << int(e.c[size_t(2 * i + 1)]) << ')';
  }
  return os.str();
}

Eigen::ArrayXcd constellation(const RingParams& p) {
  const int32_t q = p.size();
  Eigen::ArrayXcd pts(q);
  for (int32_t i = 0; i < q; ++i) pts[i] = embed_centered(element_of(i, p));
  return pts;
}

Eigen::ArrayXcd constellation(const RingParams& p, FilterIndex g) {
  const RingElement ge = element_of(g.value, p);
  const int32_t q = p.size();
  Eigen::ArrayXcd pts(q);
  for (int32_t i = 0; i < q; ++i) {
    pts[i] = embed_centered(mul(ge, element_of(i, p)));
  }
  return pts;
}

int distinct_points(const Eigen::ArrayXcd& pts, double tol) {
  // Cluster by grid cell, checking neighbor cells so near-boundary pairs
  // within tol still merge.
  struct CellHash {
    size_t operator()(const std::pair<int64_t, int64_t>& c) const {
      return std::hash<int64_t>()(c.first * 1000003 + c.second);
    }
  };
  std::unordered_map<std::pair<int64_t, int64_t>, std::vector<std::complex<double>>, CellHash> cells;
  int count = 0;
  for (Eigen::Index i = 0; i < pts.size(); ++i) {
    const std::complex<double> z = pts[i];
    const int64_t cx = int64_t(std::floor(z.real() / tol));
    const int64_t cy = int64_t(std::floor(z.imag() / tol));
    bool found = false;
    for (int64_t dx = -1; dx <= 1 && !found; ++dx) {
      for (int64_t dy = -1; dy <= 1 && !found; ++dy) {
        auto it = cells.find({cx + dx, cy + dy});
        if (it == cells.end()) continue;
        for (const auto& w : it->second) {
          if (std::abs(w - z) <= tol) {
            found = true;
            break;
          }
        }
      }
    }
    if (!found) {
      ++count;
      cells[{cx, cy}].push_back(z);
    }
  }
  return count;
}

GroupTables::GroupTables(const RingParams& p) : params(p), q(p.size()) {
  neg_perm.resize(size_t(q));
  for (int32_t i = 0; i < q; ++i) {
    neg_perm[size_t(i)] = index_of(rasc::neg(element_of(i, p)));
  }
  if (q <= 1024) {
    add_table.resize(size_t(q) * size_t(q));
    for (int32_t u = 0; u < q; ++u) {
      const RingElement eu = element_of(u, p);
      for (int32_t v = 0; v < q; ++v) {
        add_table[size_t(u) * size_t(q) + size_t(v)] =
            index_of(rasc::add(eu, element_of(v, p)));
      }
    }
  }
}

int32_t GroupTables::add_slow(int32_t u, int32_t v) const {
  return index_of(rasc::add(element_of(u, params), element_of(v, params)));
}

}  // namespace rasc
