// Reduction of semihyperbolic PD-forms to the polynomial PDJ form via the
// ladder of maps J_n = (x, y(1 + c_n x^n)), with factorial certificates, and
// the end-to-end equivalence deciders.
#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nad/oned.hpp"
#include "nad/pdulac.hpp"
#include "nad/scalar.hpp"
#include "nad/series.hpp"

namespace nad {

// (f_{m,rho,mu}(x), lambda y (1 + r(x))) with deg r < m and r(0) = 0.
struct PDJForm {
  Rat lambda;
  OneDNormalForm oned;
  std::vector<Rat> r;  // r[k] is the x^(k+1) coefficient; size m-1

  friend bool operator==(const PDJForm& a, const PDJForm& b) {
    return a.lambda == b.lambda && a.oned == b.oned && a.r == b.r;
  }
};

// The ladder data: coefficients c_1..c_L, the assembled series
// 1 + alpha = prod (1 + c_i x^i), and the factorial margins
// v_p(n! rho^n c_n) and v_p(n! rho^n A_n).  The margins refer to the
// internally rescaled (integral) data the estimates are proved for.
struct GammaLadder {
  std::vector<Rat> c;
  Series alpha;  // alpha = sum A_j x^j
  std::vector<long long> c_margins;
  std::vector<long long> alpha_margins;
};

struct PDJReduction {
  PDJForm form;
  FormalMap conjugator;  // H with H o F0 = F_PDJ o H through the truncation
  GammaLadder ladder;
  Rat scale;  // internal diagonal rescale a = p^(-s) applied before the ladder
};

namespace detail {

// Extract (f, g) from a PD-shaped map (f(x), lambda y (1 + g(x))); the stored
// coefficients are treated as exact, so both come back at truncation trunc.
inline std::pair<Series, Series> split_pd_form(const FormalMap& F0, unsigned trunc) {
  const Rat lambda = F0.eigenvalues()[1];
  Series f(1, trunc), g(1, trunc);
  f.set_coeff(Idx{1, 0}, Rat(1));
  for (const auto& [a, v] : F0.tail(0).terms()) {
    if (a[1] != 0) throw std::invalid_argument("pdj_reduce: component 1 not a series in x");
    f.set_coeff(Idx{a[0], 0}, v);
  }
  for (const auto& [a, v] : F0.tail(1).terms()) {
    if (a[1] != 1) throw std::invalid_argument("pdj_reduce: component 2 not of the form x^k y");
    g.set_coeff(Idx{a[0], 0}, v / lambda);
  }
  return {f, g};
}

inline Series one_plus(const Series& s) {
  Series out = s;
  out.add_coeff(Idx{0, 0}, Rat(1));
  return out;
}

}  // namespace detail

// The J_n ladder.  c_{n+1} is the unique solution of the congruence
//   (1+g)(1+c f^{n+1})(1+alpha o f) = (1+r)(1+c x^{n+1})(1+alpha)
// modulo x^(m+n+1), solved by exact expansion of the (m+n)-coefficient.
// F0 must be in PD shape with eigenvalues (1, lambda), |lambda| != 1, and
// its first component tangent to identity and nonlinear.
inline PDJReduction pdj_reduce(const FormalMap& F0, unsigned N, const PrimeContext& ctx) {
  if (F0.vars() != 2) throw std::invalid_argument("pdj_reduce: two variables expected");
  if (F0.eigenvalues()[0] != 1)
    throw std::invalid_argument("pdj_reduce: first eigenvalue must be 1");
  const Rat lambda = F0.eigenvalues()[1];
  if (valuation(lambda, ctx) == 0)
    throw std::domain_error("pdj_reduce: |lambda| = 1 unsupported");

  const unsigned L = N;              // ladder length
  const unsigned TX = 2 * N + 2;     // one-variable working degree
  auto [f, g] = detail::split_pd_form(retruncate(F0, N), TX);
  if (f.coeff(1u, 0u) != 1) throw std::invalid_argument("pdj_reduce: f not tangent to identity");

  // Step 1: one-variable reduction of f; transports g to g o h^{-1}.
  OneDReduction red = normal_form_1d(f, TX);
  const unsigned m = red.form.m;
  Series g1 = series_substitute(g, series_invert_1d(red.h));

  // Step 2: internal diagonal rescale diag(a, 1) with a = p^(-s) making the
  // normal form and g1 integral; the ladder estimates live on this side.
  long long s = 0;
  auto need_scale = [&](const Rat& v, long long weight) {
    if (v == 0 || weight == 0) return;
    long long need = -valuation(v, ctx);
    if (need > 0) s = std::max(s, (need + weight - 1) / weight);
  };
  need_scale(red.form.rho, m - 1);
  need_scale(red.form.mu, 2 * m - 2);
  for (const auto& [a, v] : g1.terms()) need_scale(v, a[0]);
  Rat a_scale = 1 / rat_pow(Rat(ctx.p), static_cast<unsigned>(s));  // a = p^(-s)

  Rat rho_s = red.form.rho * rat_pow(Rat(ctx.p), static_cast<unsigned>(s * (m - 1)));
  Rat mu_s = red.form.mu * rat_pow(Rat(ctx.p), static_cast<unsigned>(s * (2 * m - 2)));
  Series g_s(1, TX);
  for (const auto& [a, v] : g1.terms())
    g_s.set_coeff(a, v * rat_pow(Rat(ctx.p), static_cast<unsigned>(s) * a[0]));

  Series fstar = OneDNormalForm{m, rho_s, mu_s}.to_series(TX);

  // r = g mod x^m (scaled side).
  Series r_s(1, TX);
  for (unsigned k = 1; k < m; ++k) r_s.set_coeff(Idx{k, 0}, g_s.coeff(k, 0u));

  // Ladder loop.
  GammaLadder ladder{{}, Series(1, TX), {}, {}};
  Series alpha(1, TX);
  Series one_g = detail::one_plus(g_s);
  Series one_r = detail::one_plus(r_s);
  for (unsigned n = 0; n < L; ++n) {
    Series alpha_f = series_substitute(alpha, fstar);
    Series base_l = one_g * detail::one_plus(alpha_f);
    Series base_r = one_r * detail::one_plus(alpha);
    Series fpow = fstar.pow(n + 1);
    auto side = [&](const Rat& c) {
      // [(RHS - LHS)]_(m+n) as a function of the candidate c
      Series lhs = base_l * detail::one_plus(c * fpow);
      Series xpow = Series::monomial(1, TX, Idx{n + 1, 0}, Rat(1));
      Series rhs = base_r * detail::one_plus(c * xpow);
      return (rhs - lhs).coeff(m + n, 0u);
    };
    Rat d0 = side(Rat(0));
    Rat d1 = side(Rat(1));
    Rat slope = d1 - d0;
    if (slope == 0) throw std::logic_error("pdj_reduce: singular ladder equation");
    Rat c = -d0 / slope;
    ladder.c.push_back(c);
    // margin v_p((n+1)! rho^(n+1) c_{n+1})
    long long margin = factorial_valuation(n + 1, ctx.p) +
                       static_cast<long long>(n + 1) * valuation(rho_s, ctx);
    ladder.c_margins.push_back(c == 0 ? margin : margin + valuation(c, ctx));
    alpha = detail::one_plus(alpha) * detail::one_plus(
                Series::monomial(1, TX, Idx{n + 1, 0}, c));
    alpha.add_coeff(Idx{0, 0}, Rat(-1));
  }
  ladder.alpha = alpha;
  for (unsigned n = 1; n <= L; ++n) {
    Rat An = alpha.coeff(n, 0u);
    long long margin = factorial_valuation(n, ctx.p) +
                       static_cast<long long>(n) * valuation(rho_s, ctx);
    ladder.alpha_margins.push_back(An == 0 ? margin : margin + valuation(An, ctx));
  }

  // Conjugator H = (x, y(1 + alpha(a x))) o (h(x), y), reported for the
  // original (unscaled) coordinates.
  FormalMap gamma_u(2, N, {Rat(1), Rat(1)});
  for (unsigned j = 1; j + 1 <= N; ++j) {
    Rat Aj = alpha.coeff(j, 0u) * rat_pow(a_scale, j);
    if (Aj != 0) gamma_u.set_tail_coeff(1, Idx{j, 1}, Aj);
  }
  FormalMap h_map(2, N, {Rat(1), Rat(1)});
  for (const auto& [a, v] : red.h.terms())
    if (a[0] >= 2 && a[0] <= N) h_map.set_tail_coeff(0, Idx{a[0], 0}, v);
  FormalMap H = map_compose(gamma_u, h_map);

  // PDJ form in original coordinates: r_k = (g o h^{-1})_k for k < m.
  PDJForm form{lambda, red.form, {}};
  for (unsigned k = 1; k < m; ++k) form.r.push_back(g1.coeff(k, 0u));

  // Postconditions: h tangent to identity, k(0) = 1, residual empty.
  FormalMap F_pdj(2, N, {Rat(1), lambda});
  Series f0s = red.form.to_series(N);
  for (const auto& [a, v] : f0s.terms())
    if (a[0] >= 2) F_pdj.set_tail_coeff(0, Idx{a[0], 0}, v);
  for (unsigned k = 1; k < m && k + 1 <= N; ++k)
    if (form.r[k - 1] != 0) F_pdj.set_tail_coeff(1, Idx{k, 1}, lambda * form.r[k - 1]);
  for (const auto& [a, v] : H.tail(0).terms())
    if (a[1] != 0) throw std::logic_error("pdj_reduce: conjugator first component not pure in x");
  for (const auto& [a, v] : H.tail(1).terms())
    if (a[1] != 1) throw std::logic_error("pdj_reduce: conjugator second component not y k(x)");
  if (!verify_conjugacy(retruncate(F0, N), F_pdj, H).empty())
    throw std::logic_error("pdj_reduce: conjugacy residual nonempty");

  return PDJReduction{form, H, ladder, a_scale};
}

struct EquivResult {
  bool equivalent;
  std::string reason;
  std::optional<ZetaSolution> zeta;  // present when a root-of-unity witness exists
};

namespace detail {

// Existence of c in Q_p^x with c^e = target for every listed constraint.
// All exponents are reduced by their gcd; the remaining single power test is
// decided by is_jth_power.
inline bool solve_power_constraints(const std::vector<std::pair<unsigned, Rat>>& constraints,
                                    const PrimeContext& ctx) {
  unsigned g = 0;
  for (const auto& [e, t] : constraints) g = std::gcd(g, e);
  if (g == 0) return true;
  // w = c^g as a Z-combination of the targets
  // find x_i with sum x_i e_i = g (iterated extended gcd)
  std::vector<long long> coeffs(constraints.size(), 0);
  long long acc = 0;
  std::vector<long long> acc_coeffs;
  for (size_t i = 0; i < constraints.size(); ++i) {
    long long e = constraints[i].first;
    if (acc == 0) {
      acc = e;
      acc_coeffs.assign(constraints.size(), 0);
      acc_coeffs[i] = 1;
      continue;
    }
    // extended gcd of acc and e
    long long old_r = acc, r = e, old_s = 1, ss = 0, old_t = 0, tt = 1;
    while (r != 0) {
      long long q = old_r / r;
      old_r -= q * r;
      std::swap(old_r, r);
      old_s -= q * ss;
      std::swap(old_s, ss);
      old_t -= q * tt;
      std::swap(old_t, tt);
    }
    for (auto& x : acc_coeffs) x *= old_s;
    acc_coeffs[i] += old_t;
    acc = old_r;
  }
  auto rat_zpow = [](const Rat& x, long long e) {
    Rat r(1);
    for (long long i = 0; i < std::abs(e); ++i) r *= x;
    return e < 0 ? 1 / r : r;
  };
  Rat w(1);
  for (size_t i = 0; i < constraints.size(); ++i)
    w *= rat_zpow(constraints[i].second, acc_coeffs[i]);
  // consistency: target_i must equal w^(e_i / g)
  for (const auto& [e, t] : constraints)
    if (t != rat_zpow(w, e / g)) return false;
  return is_jth_power(w, g, ctx);
}

}  // namespace detail

// Theorem-level decider for the semihyperbolic case: both maps are run
// through the PD and PDJ pipelines; the forms are compared up to the scaling
// relation on (m, rho, mu) and a root-of-unity action on r.
inline EquivResult decide_equiv_semihyperbolic(const FormalMap& F, const FormalMap& G,
                                               unsigned N, const PrimeContext& ctx) {
  if (F.eigenvalues() != G.eigenvalues())
    throw std::invalid_argument("decide_equiv_semihyperbolic: eigenvalues must match");

  auto pipeline = [&](const FormalMap& M) {
    FormalMap Ms = conjugate_by_scaling(M, find_integralizing_q(M, ctx));
    PDResult pd = semihyperbolic_normalize(Ms, N, ctx);
    return pdj_reduce(pd.normal_form, N, ctx);
  };
  PDJReduction A = pipeline(F);
  PDJReduction B = pipeline(G);

  if (A.form.oned.m != B.form.oned.m) return {false, "leading degrees differ", std::nullopt};
  unsigned m = A.form.oned.m;
  Rat ratio = A.form.oned.rho / B.form.oned.rho;
  if (!is_jth_power(ratio, m - 1, ctx))
    return {false, "rho ratio is not an (m-1)-th power", std::nullopt};
  if (A.form.oned.mu != B.form.oned.mu * ratio * ratio)
    return {false, "mu obstruction", std::nullopt};

  // supports of r must coincide
  for (unsigned k = 1; k < m; ++k) {
    bool za = A.form.r[k - 1] == 0, zb = B.form.r[k - 1] == 0;
    if (za != zb) return {false, "remainder supports differ", std::nullopt};
  }

  bool all_signs = true;
  std::vector<std::pair<long long, int>> sign_constraints;
  std::vector<std::pair<unsigned, Rat>> power_constraints;
  power_constraints.push_back({m - 1, ratio});
  for (unsigned k = 1; k < m; ++k) {
    if (B.form.r[k - 1] == 0) continue;
    Rat q = A.form.r[k - 1] / B.form.r[k - 1];
    power_constraints.push_back({k, q});
    if (q == 1)
      sign_constraints.push_back({k, 1});
    else if (q == -1)
      sign_constraints.push_back({k, -1});
    else
      all_signs = false;
  }

  if (ratio == 1 && all_signs) {
    // pure root-of-unity matching: r(x) = r'(zeta x)
    auto zeta = solve_zeta_constraints(sign_constraints, m - 1, ctx);
    if (zeta) return {true, "PDJ forms match up to a root of unity", zeta};
    return {false, "no admissible root of unity", std::nullopt};
  }
  // general scaling: r(x) = r'(c x) with c^(m-1) = rho/rho'
  if (detail::solve_power_constraints(power_constraints, ctx))
    return {true, "PDJ forms match up to an admissible scaling", std::nullopt};
  return {false, "no admissible scaling", std::nullopt};
}

// Theorem-level decider for the repelling case: both maps reduce to
// (lambda x, lambda^n y + C x^n); equivalence holds iff the resonant
// constants are both zero or both nonzero.
inline EquivResult decide_equiv_repelling(const FormalMap& F, const FormalMap& G, unsigned n,
                                          unsigned N, const PrimeContext& ctx) {
  if (F.eigenvalues() != G.eigenvalues())
    throw std::invalid_argument("decide_equiv_repelling: eigenvalues must match");

  auto constant = [&](const FormalMap& M) {
    FormalMap Ms = conjugate_by_scaling(M, find_integralizing_q(M, ctx));
    PDResult pd = repelling_normalize(Ms, n, N, ctx);
    return pd.normal_form.tail(1).coeff(Idx{n, 0});
  };
  Rat c1 = constant(F);
  Rat c2 = constant(G);
  if ((c1 == 0) == (c2 == 0))
    return {true,
            c1 == 0 ? "both PD forms are linear" : "both resonant constants reduce to 1",
            std::nullopt};
  return {false, "one PD form is linear, the other is not", std::nullopt};
}

}  // namespace nad
