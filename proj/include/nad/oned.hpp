// One-variable formal normal form machinery: reduction of tangent-to-identity
// series to f_{m,rho,mu}, the equivalence decision via the scaling relation,
// and the leading-centralizer lemma.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "nad/scalar.hpp"
#include "nad/series.hpp"

namespace nad {

// f_{m,rho,mu}(x) = x + rho x^m + mu x^(2m-1), m >= 2, rho != 0.
struct OneDNormalForm {
  unsigned m;
  Rat rho;
  Rat mu;

  Series to_series(unsigned trunc) const {
    Series s(1, trunc);
    s.set_coeff(Idx{1, 0}, Rat(1));
    s.set_coeff(Idx{m, 0}, rho);
    s.add_coeff(Idx{2 * m - 1, 0}, mu);
    return s;
  }

  friend bool operator==(const OneDNormalForm& a, const OneDNormalForm& b) {
    return a.m == b.m && a.rho == b.rho && a.mu == b.mu;
  }
};

struct OneDReduction {
  OneDNormalForm form;
  Series h;  // tangent to identity, h o f o h^{-1} = f_{m,rho,mu} through N
};

namespace detail {
inline Series conjugate_1d(const Series& g, const Series& h) {
  return series_substitute(series_substitute(h, g), series_invert_1d(h));
}
}  // namespace detail

// Degree-by-degree reduction of f = x + O(x^2) to its normal form.  rho is
// the raw leading coefficient (no representative normalization); at the
// singular degree 2m-1 the free conjugation coefficient is zero and mu is
// recorded instead.
inline OneDReduction normal_form_1d(const Series& f, unsigned N) {
  if (f.vars() != 1) throw std::invalid_argument("normal_form_1d: one-variable series expected");
  if (f.coeff(0u, 0u) != 0 || f.coeff(1u, 0u) != 1)
    throw std::invalid_argument("normal_form_1d: series must be tangent to the identity");
  unsigned m = 0;
  for (unsigned d = 2; d <= f.truncation(); ++d) {
    if (f.coeff(d, 0u) != 0) {
      m = d;
      break;
    }
  }
  if (m == 0) throw std::domain_error("normal_form_1d: already linear");
  if (N < 2 * m - 1 || f.truncation() < N)
    throw std::invalid_argument("normal_form_1d: insufficient truncation");

  Rat rho = f.coeff(m, 0u);
  Rat mu(0);
  Series g = f.truncated(N);
  Series h(1, N);
  h.set_coeff(Idx{1, 0}, Rat(1));

  for (unsigned d = m + 1; d <= N; ++d) {
    if (d == 2 * m - 1) {
      mu = g.coeff(d, 0u);  // singular degree: record, do not eliminate
      continue;
    }
    Rat a0 = g.coeff(d, 0u);
    if (a0 == 0) continue;
    unsigned e = d - m + 1;
    // the conjugated coefficient at degree d is affine in the new h-coefficient
    Series probe(1, N);
    probe.set_coeff(Idx{1, 0}, Rat(1));
    probe.set_coeff(Idx{e, 0}, Rat(1));
    Rat b1 = detail::conjugate_1d(g, probe).coeff(d, 0u);
    Rat slope = b1 - a0;
    if (slope == 0) throw std::logic_error("normal_form_1d: singular elimination equation");
    Rat c = -a0 / slope;
    Series step(1, N);
    step.set_coeff(Idx{1, 0}, Rat(1));
    step.set_coeff(Idx{e, 0}, c);
    g = detail::conjugate_1d(g, step);
    h = series_substitute(step, h);
  }
  return OneDReduction{OneDNormalForm{m, rho, mu}, h};
}

struct EquivVerdict {
  bool equivalent;
  std::string reason;
};

// Formal equivalence of tangent-to-identity series: same m, rho/rho' a
// (m-1)-th power, and mu = mu' (rho/rho')^2 (forced since c^(m-1) = rho/rho').
inline EquivVerdict equiv_1d(const Series& f, const Series& g, unsigned N,
                             const PrimeContext& ctx) {
  OneDReduction rf = normal_form_1d(f, N);
  OneDReduction rg = normal_form_1d(g, N);
  if (rf.form.m != rg.form.m) return {false, "leading degrees differ"};
  Rat ratio = rf.form.rho / rg.form.rho;
  if (!is_jth_power(ratio, rf.form.m - 1, ctx))
    return {false, "rho ratio is not an (m-1)-th power"};
  if (rf.form.mu != rg.form.mu * ratio * ratio)
    return {false, "mu obstruction"};
  return {true, "normal forms match up to scaling"};
}

struct CentralizerResult {
  std::optional<Rat> zeta;      // present iff h centralizes f through N
  unsigned violating_degree{};  // meaningful when zeta is absent
};

// If h o f = f o h through degree N, h must agree with zeta x modulo x^m for
// an (m-1)-root of unity zeta = h'(0); otherwise report the first violation.
inline CentralizerResult leading_centralizer(const Series& h, const Series& f, unsigned N) {
  if (h.vars() != 1 || f.vars() != 1)
    throw std::invalid_argument("leading_centralizer: one-variable series expected");
  if (h.coeff(1u, 0u) == 0)
    throw std::invalid_argument("leading_centralizer: h must be invertible");
  Series lhs = series_substitute(h.truncated(N), f.truncated(N));
  Series rhs = series_substitute(f.truncated(N), h.truncated(N));
  Series diff = lhs - rhs;
  if (!diff.is_zero()) {
    unsigned d = diff.order();
    return CentralizerResult{std::nullopt, d};
  }
  unsigned m = 0;
  for (unsigned d = 2; d <= f.truncation(); ++d) {
    if (f.coeff(d, 0u) != 0) {
      m = d;
      break;
    }
  }
  Rat zeta = h.coeff(1u, 0u);
  if (m >= 2) {
    Rat zp(1);
    for (unsigned i = 0; i + 1 < m; ++i) zp *= zeta;
    if (zp != 1) throw std::logic_error("leading_centralizer: zeta^(m-1) != 1");
    for (unsigned d = 2; d < m && d <= N; ++d)
      if (h.coeff(d, 0u) != 0)
        throw std::logic_error("leading_centralizer: h != zeta x mod x^m");
  }
  return CentralizerResult{zeta, 0};
}

}  // namespace nad
