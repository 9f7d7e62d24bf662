// Tau-descriptors for coefficient-bounding functions, brute-force checking of
// the (weakly) dynamic inequalities on bounded index sets, and membership
// testing for the groups G(tau).
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nad/pdulac.hpp"
#include "nad/scalar.hpp"
#include "nad/series.hpp"

namespace nad {

// tau: A_t -> K^r.  For the exponential variants the component values are
// powers of a fixed base lambda (or q), so the inequalities reduce to integer
// exponent arithmetic at the valuation level.
struct TauSpec {
  enum class Variant { factorial, maxes, mixed, sigma, table };

  Variant variant;
  unsigned r = 1;  // number of components / variables
  unsigned t = 1;  // minimal total degree of the domain A_t
  Rat lambda;      // maxes, mixed, table base
  unsigned n = 0;  // mixed parameter
  Rat q;           // sigma base
  unsigned m = 0;  // sigma parameter
  std::map<unsigned long long, long long> table_exponents;  // |a| -> exponent

  static TauSpec factorial_spec() {
    TauSpec s;
    s.variant = Variant::factorial;
    s.r = 1;
    s.t = 1;
    return s;
  }
  static TauSpec maxes_spec(const Rat& lambda) {
    TauSpec s;
    s.variant = Variant::maxes;
    s.r = 2;
    s.t = 2;
    s.lambda = lambda;
    return s;
  }
  static TauSpec mixed_spec(const Rat& lambda, unsigned n) {
    TauSpec s;
    s.variant = Variant::mixed;
    s.r = 2;
    s.t = 2;
    s.lambda = lambda;
    s.n = n;
    return s;
  }
  static TauSpec sigma_spec(const Rat& q, unsigned m) {
    TauSpec s;
    s.variant = Variant::sigma;
    s.r = 1;
    s.t = 2;
    s.q = q;
    s.m = m;
    return s;
  }
  static TauSpec table_spec(const Rat& lambda,
                            std::map<unsigned long long, long long> exponents, unsigned t = 1) {
    TauSpec s;
    s.variant = Variant::table;
    s.r = 1;
    s.t = t;
    s.lambda = lambda;
    s.table_exponents = std::move(exponents);
    return s;
  }
};

// sigma(n) = (n+1) + m floor((n-2)/(m-1))
inline long long sigma_exponent(unsigned long long deg, unsigned m) {
  if (m < 2) throw std::invalid_argument("sigma_exponent: m >= 2 required");
  long long n = static_cast<long long>(deg);
  long long mm = static_cast<long long>(m);
  long long num = n - 2;
  long long fl = num >= 0 ? num / (mm - 1) : -(((-num) + mm - 2) / (mm - 1));
  return (n + 1) + mm * fl;
}

namespace detail {

inline unsigned long long index_total(const std::vector<unsigned long long>& a) {
  unsigned long long s = 0;
  for (auto x : a) s += x;
  return s;
}

// valuation of tau_k(a) expressed over the base valuation:
// for the exponential variants returns exponent * v(base); for factorial,
// v_p(|a|!) directly.
inline long long tau_valuation(const TauSpec& spec, const std::vector<unsigned long long>& a,
                               unsigned k, const PrimeContext& ctx) {
  if (a.size() != spec.r) throw std::invalid_argument("tau_valuation: index arity mismatch");
  unsigned long long total = index_total(a);
  if (total < spec.t) throw std::domain_error("tau_valuation: index below t");
  switch (spec.variant) {
    case TauSpec::Variant::factorial:
      return factorial_valuation(total, ctx.p);
    case TauSpec::Variant::maxes: {
      long long e = std::max<long long>(1, static_cast<long long>(a[1]));
      return e * valuation(spec.lambda, ctx);
    }
    case TauSpec::Variant::mixed: {
      long long lin = static_cast<long long>(a[0]) +
                      static_cast<long long>(spec.n) * static_cast<long long>(a[1]);
      long long e = (k == 0) ? lin : std::max<long long>(spec.n, lin);
      return e * valuation(spec.lambda, ctx);
    }
    case TauSpec::Variant::sigma:
      return sigma_exponent(total, spec.m) * valuation(spec.q, ctx);
    case TauSpec::Variant::table: {
      auto it = spec.table_exponents.find(total);
      if (it == spec.table_exponents.end())
        throw std::domain_error("tau_valuation: table entry missing");
      return it->second * valuation(spec.lambda, ctx);
    }
  }
  throw std::logic_error("tau_valuation: unreachable");
}

}  // namespace detail

// Exact value of tau_k(a); k is zero-based.
inline Rat tau_eval(const TauSpec& spec, const std::vector<unsigned long long>& a, unsigned k,
                    const PrimeContext& ctx) {
  if (k >= spec.r) throw std::invalid_argument("tau_eval: component out of range");
  unsigned long long total = detail::index_total(a);
  if (a.size() != spec.r || total < spec.t)
    throw std::domain_error("tau_eval: index outside A_t");
  auto int_pow = [](const Rat& base, long long e) {
    Rat r(1);
    for (long long i = 0; i < (e < 0 ? -e : e); ++i) r *= base;
    return e < 0 ? 1 / r : r;
  };
  switch (spec.variant) {
    case TauSpec::Variant::factorial: {
      Rat f(1);
      for (unsigned long long i = 2; i <= total; ++i) f *= Rat(i);
      return f;
    }
    case TauSpec::Variant::maxes:
      return int_pow(spec.lambda, std::max<long long>(1, static_cast<long long>(a[1])));
    case TauSpec::Variant::mixed: {
      long long lin = static_cast<long long>(a[0]) +
                      static_cast<long long>(spec.n) * static_cast<long long>(a[1]);
      return int_pow(spec.lambda, (k == 0) ? lin : std::max<long long>(spec.n, lin));
    }
    case TauSpec::Variant::sigma:
      return int_pow(spec.q, sigma_exponent(total, spec.m));
    case TauSpec::Variant::table: {
      auto it = spec.table_exponents.find(total);
      if (it == spec.table_exponents.end())
        throw std::domain_error("tau_eval: table entry missing");
      return int_pow(spec.lambda, it->second);
    }
  }
  throw std::logic_error("tau_eval: unreachable");
}

enum class DynMode { weak, strong };

// A decomposition violating the (weakly) dynamic inequality:
// a^(k) = sum_i parts[k][i] with b-vectors bs[k][i] in A_t (b_0^(k) = e_k
// implicit with multiplicity a0[k]); c = sum a0[k] e_k + sum parts * b.
struct DynWitness {
  std::vector<unsigned long long> a;
  std::vector<unsigned long long> a0;                           // a_0^(k)
  std::vector<std::vector<unsigned long long>> parts;           // a_i^(k), i >= 1
  std::vector<std::vector<std::vector<unsigned long long>>> bs; // b_i^(k)
  std::vector<unsigned long long> c;
  unsigned component;   // failing n, zero-based
  long long lhs_val;    // v(tau_n(c)) (+ multinomial valuation in weak mode)
  long long rhs_val;    // v(tau_n(a)) + sum a_i^(k) v(tau_k(b_i^(k)))
};

// Re-derives both sides from the witness fields alone.
inline bool reverify_witness(const TauSpec& spec, const DynWitness& w, DynMode mode,
                             const PrimeContext& ctx) {
  std::vector<unsigned long long> c(spec.r, 0);
  long long rhs = 0, multi = 0;
  for (unsigned k = 0; k < spec.r; ++k) {
    c[k] += w.a0[k];
    unsigned long long acc = w.a0[k];
    for (size_t i = 0; i < w.parts[k].size(); ++i) {
      unsigned long long ai = w.parts[k][i];
      for (unsigned j = 0; j < spec.r; ++j) c[j] += ai * w.bs[k][i][j];
      rhs += static_cast<long long>(ai) * detail::tau_valuation(spec, w.bs[k][i], k, ctx);
      // multinomial factor built incrementally: v(C(acc+ai, ai))
      long long num = factorial_valuation(acc + ai, ctx.p);
      multi += num - factorial_valuation(acc, ctx.p) - factorial_valuation(ai, ctx.p);
      acc += ai;
    }
  }
  if (c != w.c) return false;
  long long lhs = detail::tau_valuation(spec, c, w.component, ctx);
  if (mode == DynMode::weak) lhs += multi;
  rhs += detail::tau_valuation(spec, w.a, w.component, ctx);
  if (lhs != w.lhs_val || rhs != w.rhs_val) return false;
  return lhs < rhs;  // |LHS| > |RHS| means the inequality fails
}

namespace detail {

// Enumerate the multisets of (part size, b vector) decompositions of one
// component and fold them into the search.  Parts are produced with sizes
// nonincreasing and, within equal sizes, b vectors lexicographically
// nondecreasing, so each unordered decomposition appears once.
struct ComponentDecomp {
  unsigned long long a0;
  std::vector<unsigned long long> parts;
  std::vector<std::vector<unsigned long long>> bs;
};

inline void enumerate_component(unsigned long long total, unsigned long long bound,
                                const std::vector<std::vector<unsigned long long>>& bvecs,
                                std::vector<ComponentDecomp>& out) {
  // choose a0 from 0..total, then partition the rest with labelled b's
  ComponentDecomp cur;
  std::function<void(unsigned long long, unsigned long long, size_t)> rec =
      [&](unsigned long long remaining, unsigned long long max_part, size_t min_b) {
        if (remaining == 0) {
          out.push_back(cur);
          return;
        }
        for (unsigned long long part = std::min(remaining, max_part); part >= 1; --part) {
          size_t start = (part == max_part) ? min_b : 0;
          for (size_t bi = start; bi < bvecs.size(); ++bi) {
            cur.parts.push_back(part);
            cur.bs.push_back(bvecs[bi]);
            rec(remaining - part, part, bi);
            cur.parts.pop_back();
            cur.bs.pop_back();
          }
        }
      };
  for (unsigned long long a0 = 0; a0 <= total; ++a0) {
    cur.a0 = a0;
    cur.parts.clear();
    cur.bs.clear();
    rec(total - a0, total, 0);
  }
  (void)bound;
}

}  // namespace detail

// Exhaustive check of the (weakly) dynamic inequality over all target indices
// a with t <= |a| <= bound, all per-component partitions, and all b vectors
// with t <= |b| <= bound.  Returns the first witness in enumeration order
// (a lexicographic ascending, then decomposition order).
inline std::optional<DynWitness> check_dynamic(const TauSpec& spec, unsigned long long bound,
                                               DynMode mode, const PrimeContext& ctx) {
  // admissible b vectors, lexicographic
  std::vector<std::vector<unsigned long long>> bvecs;
  std::vector<unsigned long long> idx(spec.r, 0);
  std::function<void(unsigned)> gen = [&](unsigned pos) {
    if (pos == spec.r) {
      unsigned long long tot = detail::index_total(idx);
      if (tot >= spec.t && tot <= bound) bvecs.push_back(idx);
      return;
    }
    for (unsigned long long v = 0; v <= bound; ++v) {
      idx[pos] = v;
      gen(pos + 1);
    }
  };
  gen(0);

  // target indices a, lexicographic
  std::vector<std::vector<unsigned long long>> targets;
  std::function<void(unsigned)> gent = [&](unsigned pos) {
    if (pos == spec.r) {
      unsigned long long tot = detail::index_total(idx);
      if (tot >= spec.t && tot <= bound) targets.push_back(idx);
      return;
    }
    for (unsigned long long v = 0; v <= bound; ++v) {
      idx[pos] = v;
      gent(pos + 1);
    }
  };
  idx.assign(spec.r, 0);
  gent(0);

  for (const auto& a : targets) {
    // per-component decomposition lists
    std::vector<std::vector<detail::ComponentDecomp>> decomps(spec.r);
    for (unsigned k = 0; k < spec.r; ++k)
      detail::enumerate_component(a[k], bound, bvecs, decomps[k]);

    // cartesian product over components
    std::vector<size_t> pick(spec.r, 0);
    while (true) {
      // assemble c and both sides
      std::vector<unsigned long long> c(spec.r, 0);
      long long rhs_common = 0, multi = 0;
      for (unsigned k = 0; k < spec.r; ++k) {
        const auto& d = decomps[k][pick[k]];
        c[k] += d.a0;
        unsigned long long acc = d.a0;
        for (size_t i = 0; i < d.parts.size(); ++i) {
          unsigned long long ai = d.parts[i];
          for (unsigned j = 0; j < spec.r; ++j) c[j] += ai * d.bs[i][j];
          rhs_common += static_cast<long long>(ai) * detail::tau_valuation(spec, d.bs[i], k, ctx);
          multi += factorial_valuation(acc + ai, ctx.p) - factorial_valuation(acc, ctx.p) -
                   factorial_valuation(ai, ctx.p);
          acc += ai;
        }
      }
      bool table_ok = spec.variant != TauSpec::Variant::table ||
                      spec.table_exponents.count(detail::index_total(c)) > 0;
      if (table_ok) {
        for (unsigned ncomp = 0; ncomp < spec.r; ++ncomp) {
          long long lhs = detail::tau_valuation(spec, c, ncomp, ctx);
          if (mode == DynMode::weak) lhs += multi;
          long long rhs = rhs_common + detail::tau_valuation(spec, a, ncomp, ctx);
          if (lhs < rhs) {
            DynWitness w;
            w.a = a;
            w.c = c;
            w.component = ncomp;
            w.lhs_val = lhs;
            w.rhs_val = rhs;
            for (unsigned k = 0; k < spec.r; ++k) {
              const auto& d = decomps[k][pick[k]];
              w.a0.push_back(d.a0);
              w.parts.push_back(d.parts);
              w.bs.push_back(d.bs);
            }
            return w;
          }
        }
      }
      // advance the product
      unsigned k = 0;
      while (k < spec.r && ++pick[k] == decomps[k].size()) {
        pick[k] = 0;
        ++k;
      }
      if (k == spec.r) break;
    }
  }
  return std::nullopt;
}

struct MembershipFailure {
  unsigned component;  // zero-based
  Idx index;
  long long margin;
};

struct MembershipResult {
  bool pass;
  std::optional<MembershipFailure> offending;  // first failure
  long long worst_margin;                      // min over checked coefficients; 0 if none
};

// Checks tau_k(a) [F]^k_a in Delta for every stored tail coefficient of F.
// Eigenvalues, when full group membership is claimed, must be units; they are
// checked here and reported as component failures at the linear index.
inline MembershipResult membership(const FormalMap& F, const TauSpec& spec,
                                   const PrimeContext& ctx, bool require_unit_diagonal = true) {
  if (F.vars() != spec.r)
    throw std::invalid_argument("membership: arity mismatch between map and spec");
  MembershipResult res{true, std::nullopt, 0};
  auto record = [&](unsigned k, const Idx& a, long long margin) {
    res.worst_margin = std::min(res.worst_margin, margin);
    if (margin < 0 && res.pass) {
      res.pass = false;
      res.offending = MembershipFailure{k, a, margin};
    }
  };
  if (require_unit_diagonal) {
    for (unsigned k = 0; k < F.vars(); ++k) {
      long long v = valuation(F.eigenvalues()[k], ctx);
      if (v != 0) {
        Idx e{0, 0};
        e[k] = 1;
        record(k, e, v < 0 ? v : -v);
      }
    }
  }
  for (unsigned k = 0; k < F.vars(); ++k) {
    for (const auto& [a, coeff] : F.tail(k).terms()) {
      std::vector<unsigned long long> av;
      for (unsigned j = 0; j < F.vars(); ++j) av.push_back(a[j]);
      if (detail::index_total(av) < spec.t) continue;
      long long margin = detail::tau_valuation(spec, av, k, ctx) + valuation(coeff, ctx);
      record(k, a, margin);
    }
  }
  return res;
}

}  // namespace nad
