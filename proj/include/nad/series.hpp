// Sparse truncated power series in one and two variables, and formal maps
// with diagonal invertible linear part: near-ring operations, composition,
// map inversion, the rescaling change of variable and conjugacy residuals.
#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nad/scalar.hpp"

namespace nad {

// Exponent vector (i, j); one-variable series keep j = 0.
using Idx = std::array<unsigned, 2>;

inline unsigned idx_total(const Idx& a) { return a[0] + a[1]; }

// Truncated series: exact through total degree <= truncation, higher terms
// dropped.  Zero coefficients are never stored.
class Series {
 public:
  Series(int vars, unsigned truncation) : vars_(vars), trunc_(truncation) {
    if (vars != 1 && vars != 2) throw std::invalid_argument("Series: vars must be 1 or 2");
  }

  int vars() const { return vars_; }
  unsigned truncation() const { return trunc_; }
  const std::map<Idx, Rat>& terms() const { return c_; }

  Rat coeff(const Idx& a) const {
    auto it = c_.find(a);
    return it == c_.end() ? Rat(0) : it->second;
  }
  Rat coeff(unsigned i, unsigned j = 0) const { return coeff(Idx{i, j}); }

  void set_coeff(const Idx& a, const Rat& v) {
    if (vars_ == 1 && a[1] != 0)
      throw std::invalid_argument("Series: second exponent in a 1-variable series");
    if (idx_total(a) > trunc_) return;
    if (v == 0)
      c_.erase(a);
    else
      c_[a] = v;
  }
  void set_coeff(unsigned i, unsigned j, const Rat& v) { set_coeff(Idx{i, j}, v); }

  void add_coeff(const Idx& a, const Rat& v) { set_coeff(a, coeff(a) + v); }

  bool is_zero() const { return c_.empty(); }

  static Series monomial(int vars, unsigned trunc, const Idx& a, const Rat& v) {
    Series s(vars, trunc);
    s.set_coeff(a, v);
    return s;
  }

  Series truncated(unsigned new_trunc) const {
    Series out(vars_, new_trunc);
    for (const auto& [a, v] : c_)
      if (idx_total(a) <= new_trunc) out.c_[a] = v;
    return out;
  }

  // Lowest total degree with a nonzero coefficient, or trunc+1 if zero.
  unsigned order() const {
    unsigned best = trunc_ + 1;
    for (const auto& [a, v] : c_) best = std::min(best, idx_total(a));
    return best;
  }

  friend Series operator+(const Series& f, const Series& g) {
    check_compatible(f, g);
    Series out(f.vars_, std::min(f.trunc_, g.trunc_));
    for (const auto& [a, v] : f.c_) out.add_coeff(a, v);
    for (const auto& [a, v] : g.c_) out.add_coeff(a, v);
    return out;
  }

  friend Series operator-(const Series& f, const Series& g) {
    check_compatible(f, g);
    Series out(f.vars_, std::min(f.trunc_, g.trunc_));
    for (const auto& [a, v] : f.c_) out.add_coeff(a, v);
    for (const auto& [a, v] : g.c_) out.add_coeff(a, -v);
    return out;
  }

  friend Series operator*(const Series& f, const Series& g) {
    check_compatible(f, g);
    Series out(f.vars_, std::min(f.trunc_, g.trunc_));
    for (const auto& [a, va] : f.c_) {
      if (idx_total(a) > out.trunc_) continue;
      for (const auto& [b, vb] : g.c_) {
        Idx c{a[0] + b[0], a[1] + b[1]};
        if (idx_total(c) > out.trunc_) continue;
        out.add_coeff(c, va * vb);
      }
    }
    return out;
  }

  friend Series operator*(const Rat& s, const Series& f) {
    Series out(f.vars_, f.trunc_);
    if (s == 0) return out;
    for (const auto& [a, v] : f.c_) out.c_[a] = s * v;
    return out;
  }

  friend bool operator==(const Series& f, const Series& g) {
    return f.vars_ == g.vars_ && f.c_ == g.c_;
  }

  Series pow(unsigned e) const {
    Series out(vars_, trunc_);
    out.set_coeff(Idx{0, 0}, Rat(1));
    for (unsigned k = 0; k < e; ++k) out = out * *this;
    return out;
  }

 private:
  static void check_compatible(const Series& f, const Series& g) {
    if (f.vars_ != g.vars_) throw std::invalid_argument("Series: variable count mismatch");
  }

  int vars_;
  unsigned trunc_;
  std::map<Idx, Rat> c_;
};

// outer(inner) for one-variable series; inner must vanish at 0 so the result
// is exact through the truncation degree.
inline Series series_substitute(const Series& outer, const Series& inner) {
  if (outer.vars() != 1 || inner.vars() != 1)
    throw std::invalid_argument("series_substitute: one-variable series expected");
  if (inner.coeff(0u, 0u) != 0)
    throw std::invalid_argument("series_substitute: inner constant term must vanish");
  unsigned trunc = std::min(outer.truncation(), inner.truncation());
  Series out(1, trunc);
  Series power(1, trunc);
  power.set_coeff(Idx{0, 0}, Rat(1));
  unsigned max_deg = trunc;
  for (unsigned d = 0; d <= max_deg; ++d) {
    Rat cd = outer.coeff(d, 0u);
    if (cd != 0) out = out + cd * power;
    if (d < max_deg) power = power * inner;
  }
  return out;
}

// Substitute a pair of zero-constant series into a two-variable series.
inline Series series_substitute2(const Series& outer, const Series& sx, const Series& sy) {
  if (outer.vars() != 2) throw std::invalid_argument("series_substitute2: 2-variable outer expected");
  if (sx.vars() != sy.vars()) throw std::invalid_argument("series_substitute2: mismatched inners");
  if (sx.coeff(0u, 0u) != 0 || sy.coeff(0u, 0u) != 0)
    throw std::invalid_argument("series_substitute2: inner constant terms must vanish");
  unsigned trunc = std::min({outer.truncation(), sx.truncation(), sy.truncation()});
  int vars = sx.vars();
  Series out(vars, trunc);
  // cached powers
  std::vector<Series> px, py;
  Series one(vars, trunc);
  one.set_coeff(Idx{0, 0}, Rat(1));
  px.push_back(one);
  py.push_back(one);
  for (unsigned d = 1; d <= trunc; ++d) {
    px.push_back(px.back() * sx);
    py.push_back(py.back() * sy);
  }
  for (const auto& [a, v] : outer.terms()) {
    if (idx_total(a) > trunc) continue;
    out = out + v * (px[a[0]] * py[a[1]]);
  }
  return out;
}

// Functional inverse of a one-variable series with nonzero linear
// coefficient, exact through the truncation: h(out) = out(h) = x.
inline Series series_invert_1d(const Series& h) {
  if (h.vars() != 1) throw std::invalid_argument("series_invert_1d: one-variable series expected");
  Rat c1 = h.coeff(1u, 0u);
  if (c1 == 0) throw std::invalid_argument("series_invert_1d: linear coefficient must be nonzero");
  if (h.coeff(0u, 0u) != 0)
    throw std::invalid_argument("series_invert_1d: constant term must vanish");
  unsigned N = h.truncation();
  Series g(1, N);
  g.set_coeff(Idx{1, 0}, 1 / c1);
  for (unsigned d = 2; d <= N; ++d) {
    Series e = series_substitute(h, g);  // should be x through degree d
    Rat err = e.coeff(d, 0u);
    if (err != 0) g.add_coeff(Idx{d, 0}, -err / c1);
  }
  return g;
}

// Formal map with diagonal invertible linear part; component k is
// eigenvalue[k] * x_k + tail[k], the tail having no constant or linear terms.
class FormalMap {
 public:
  FormalMap(int vars, unsigned truncation, std::vector<Rat> eigenvalues)
      : vars_(vars), trunc_(truncation), eig_(std::move(eigenvalues)) {
    if (vars != 1 && vars != 2) throw std::invalid_argument("FormalMap: vars must be 1 or 2");
    if (eig_.size() != static_cast<size_t>(vars))
      throw std::invalid_argument("FormalMap: one eigenvalue per variable");
    for (const Rat& l : eig_)
      if (l == 0) throw std::invalid_argument("FormalMap: eigenvalues must be nonzero");
    tail_.assign(vars, Series(vars, truncation));
  }

  static FormalMap identity(int vars, unsigned trunc) {
    return FormalMap(vars, trunc, std::vector<Rat>(vars, Rat(1)));
  }

  int vars() const { return vars_; }
  unsigned truncation() const { return trunc_; }
  const std::vector<Rat>& eigenvalues() const { return eig_; }
  const Series& tail(int k) const { return tail_.at(k); }

  void set_tail_coeff(int k, const Idx& a, const Rat& v) {
    if (idx_total(a) < 2)
      throw std::invalid_argument("FormalMap: tail terms must have total degree >= 2");
    tail_.at(k).set_coeff(a, v);
  }

  // Full component series lambda_k x_k + tail_k.
  Series component(int k) const {
    Series s = tail_.at(k);
    Idx lin{0, 0};
    lin[k] = 1;
    s.add_coeff(lin, eig_.at(k));
    return s;
  }

  bool is_linear() const {
    for (const Series& t : tail_)
      if (!t.is_zero()) return false;
    return true;
  }

  friend bool operator==(const FormalMap& f, const FormalMap& g) {
    return f.vars_ == g.vars_ && f.eig_ == g.eig_ && f.tail_ == g.tail_;
  }

 private:
  int vars_;
  unsigned trunc_;
  std::vector<Rat> eig_;
  std::vector<Series> tail_;
};

// F o G, exact through the common truncation.
inline FormalMap map_compose(const FormalMap& F, const FormalMap& G) {
  if (F.vars() != G.vars()) throw std::invalid_argument("map_compose: dimension mismatch");
  if (F.truncation() != G.truncation())
    throw std::invalid_argument("map_compose: truncation mismatch");
  int vars = F.vars();
  unsigned N = F.truncation();
  std::vector<Rat> eig(vars);
  for (int k = 0; k < vars; ++k) eig[k] = F.eigenvalues()[k] * G.eigenvalues()[k];
  FormalMap out(vars, N, eig);
  for (int k = 0; k < vars; ++k) {
    Series comp(vars, N);
    if (vars == 1) {
      comp = series_substitute(F.component(k), G.component(0));
    } else {
      comp = series_substitute2(F.component(k), G.component(0), G.component(1));
    }
    Idx lin{0, 0};
    lin[k] = 1;
    comp.add_coeff(lin, -eig[k]);
    for (const auto& [a, v] : comp.terms()) {
      if (idx_total(a) < 2)
        throw std::logic_error("map_compose: non-diagonal linear part");
      out.set_tail_coeff(k, a, v);
    }
  }
  return out;
}

// Inverse of F through the truncation, computed degree by degree.
inline FormalMap map_inverse(const FormalMap& F) {
  int vars = F.vars();
  unsigned N = F.truncation();
  std::vector<Rat> eig(vars);
  for (int k = 0; k < vars; ++k) eig[k] = 1 / F.eigenvalues()[k];
  FormalMap G(vars, N, eig);
  for (unsigned d = 2; d <= N; ++d) {
    FormalMap E = map_compose(F, G);  // should be Id through degree d
    for (int k = 0; k < vars; ++k) {
      for (const auto& [a, v] : E.tail(k).terms()) {
        if (idx_total(a) != d) continue;
        G.set_tail_coeff(k, a, G.tail(k).coeff(a) - v / F.eigenvalues()[k]);
      }
    }
  }
  return G;
}

// Copy of F at a (typically lower) working truncation.
inline FormalMap retruncate(const FormalMap& F, unsigned N) {
  FormalMap out(F.vars(), N, F.eigenvalues());
  for (int k = 0; k < F.vars(); ++k)
    for (const auto& [a, v] : F.tail(k).terms())
      if (idx_total(a) <= N) out.set_tail_coeff(k, a, v);
  return out;
}

// L_q^{-1} o F o L_q: the coefficient at index a picks up the factor
// q^(|a|-1) in every component.
inline FormalMap conjugate_by_scaling(const FormalMap& F, const Rat& q) {
  if (q == 0) throw std::invalid_argument("conjugate_by_scaling: q must be nonzero");
  FormalMap out(F.vars(), F.truncation(), F.eigenvalues());
  for (int k = 0; k < F.vars(); ++k) {
    for (const auto& [a, v] : F.tail(k).terms()) {
      Rat factor(1);
      for (unsigned i = 1; i < idx_total(a); ++i) factor *= q;
      out.set_tail_coeff(k, a, factor * v);
    }
  }
  return out;
}

// Smallest q = p^s making every nonlinear coefficient of the conjugate
// integral: s = max(0, max_a ceil(-v_p(c_a) / (|a|-1))).
inline Rat find_integralizing_q(const FormalMap& F, const PrimeContext& ctx) {
  long long s = 0;
  for (int k = 0; k < F.vars(); ++k) {
    for (const auto& [a, v] : F.tail(k).terms()) {
      long long d = static_cast<long long>(idx_total(a)) - 1;
      long long need = -valuation(v, ctx);  // want v + s*d >= 0
      if (need > 0) s = std::max(s, (need + d - 1) / d);
    }
  }
  Rat q(1);
  for (long long i = 0; i < s; ++i) q *= Rat(ctx.p);
  return q;
}

struct ResidualEntry {
  int component;  // 0-based
  Idx index;
  Rat value;
};

// Exact residual Phi o F - F0 o Phi through the common truncation; an empty
// list certifies the conjugacy to that degree.
inline std::vector<ResidualEntry> verify_conjugacy(const FormalMap& F, const FormalMap& F0,
                                                   const FormalMap& Phi) {
  FormalMap lhs = map_compose(Phi, F);
  FormalMap rhs = map_compose(F0, Phi);
  std::vector<ResidualEntry> out;
  for (int k = 0; k < F.vars(); ++k) {
    Series diff = lhs.component(k) - rhs.component(k);
    for (const auto& [a, v] : diff.terms()) out.push_back({k, a, v});
  }
  return out;
}

// Geometric-growth certificate: R = p^exponent bounds |c_a| <= R^{|a|} for
// every stored coefficient, so the series converges on the polydisc of
// radius 1/R = p^(-exponent).
struct GrowthCertificate {
  long long exponent;  // R = p^exponent (minimal integer exponent, >= 0)
};

inline GrowthCertificate growth_certificate(const FormalMap& F, const PrimeContext& ctx) {
  long long e = 0;
  for (int k = 0; k < F.vars(); ++k) {
    for (const auto& [a, v] : F.tail(k).terms()) {
      long long n = idx_total(a);
      long long need = -valuation(v, ctx);  // want |c| = p^need <= p^(e*n)
      if (need > 0) e = std::max(e, (need + n - 1) / n);
    }
  }
  return GrowthCertificate{e};
}

}  // namespace nad
