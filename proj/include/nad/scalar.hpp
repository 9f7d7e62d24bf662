// Exact rational arithmetic over Q carrying a p-adic valuation, plus the
// number-theoretic decision helpers (j-th power test, root-of-unity
// constraint solver) used by the uniqueness procedures.
#pragma once

#include <array>
#include <climits>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace nad {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Sentinel for v_p(0) = +infinity.
inline constexpr long long kValInfinity = LLONG_MAX;

inline bool is_prime(const Int& n) {
  if (n < 2) return false;
  for (Int d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

// Fixes the prime p; the norm is |x| = p^(-v_p(x)) and the constant of the
// factorial estimate |n!| >= alpha^n is alpha = 1/p.
struct PrimeContext {
  Int p;

  explicit PrimeContext(Int prime) : p(std::move(prime)) {
    if (!is_prime(p)) throw std::invalid_argument("PrimeContext: p must be prime");
  }
};

inline long long int_valuation(Int n, const Int& p) {
  if (n == 0) return kValInfinity;
  if (n < 0) n = -n;
  long long v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

// v_p(num) - v_p(den); kValInfinity iff x = 0.
inline long long valuation(const Rat& x, const PrimeContext& ctx) {
  if (x == 0) return kValInfinity;
  return int_valuation(numerator(x), ctx.p) - int_valuation(denominator(x), ctx.p);
}

// |x| = p^exponent, stored exactly; empty exponent encodes |0| = 0.
struct NormValue {
  Int base;
  std::optional<long long> exponent;  // nullopt: the zero norm

  bool is_zero() const { return !exponent.has_value(); }

  friend bool operator==(const NormValue& a, const NormValue& b) {
    return a.base == b.base && a.exponent == b.exponent;
  }
  friend bool operator<(const NormValue& a, const NormValue& b) {
    if (a.is_zero()) return !b.is_zero();
    if (b.is_zero()) return false;
    return *a.exponent < *b.exponent;
  }
  friend bool operator<=(const NormValue& a, const NormValue& b) {
    return a == b || a < b;
  }
};

inline NormValue norm(const Rat& x, const PrimeContext& ctx) {
  if (x == 0) return NormValue{ctx.p, std::nullopt};
  return NormValue{ctx.p, -valuation(x, ctx)};
}

// x lies in the ring of integers Delta = B+(0,1).
inline bool is_integral(const Rat& x, const PrimeContext& ctx) {
  return valuation(x, ctx) >= 0;
}

// Legendre: v_p(n!) = sum_i floor(n / p^i).
inline long long factorial_valuation(unsigned long long n, const Int& p) {
  long long v = 0;
  Int q = p;
  while (q <= n) {
    v += static_cast<long long>(Int(n / q).convert_to<unsigned long long>());
    q *= p;
  }
  return v;
}

// |n!| >= (1/p)^n, i.e. v_p(n!) <= n.
inline bool factorial_bound_check(unsigned long long n, const PrimeContext& ctx) {
  return factorial_valuation(n, ctx.p) <= static_cast<long long>(n);
}

inline Int mod_pow(Int base, Int exp, const Int& mod) {
  Int r = 1;
  base %= mod;
  if (base < 0) base += mod;
  while (exp > 0) {
    if (exp % 2 == 1) r = r * base % mod;
    base = base * base % mod;
    exp /= 2;
  }
  return r;
}

inline Int mod_inverse(const Int& a, const Int& mod) {
  Int old_r = a % mod, r = mod;
  if (old_r < 0) old_r += mod;
  Int old_s = 1, s = 0;
  while (r != 0) {
    Int q = old_r / r;
    old_r -= q * r;
    std::swap(old_r, r);
    old_s -= q * s;
    std::swap(old_s, s);
  }
  if (old_r != 1) throw std::domain_error("mod_inverse: not invertible");
  old_s %= mod;
  if (old_s < 0) old_s += mod;
  return old_s;
}

// Decides x in (Q_p^x)^j.  The valuation must be divisible by j and the unit
// part must be a j-th power modulo p^(1 + 2 v_p(j)); by Hensel's lemma the
// residue test is equivalent to being a j-th power of a unit.
inline bool is_jth_power(const Rat& x, unsigned j, const PrimeContext& ctx) {
  if (x == 0) throw std::domain_error("is_jth_power: x must be nonzero");
  if (j == 0) throw std::domain_error("is_jth_power: j must be >= 1");
  if (j == 1) return true;
  long long v = valuation(x, ctx);
  if (v % static_cast<long long>(j) != 0) return false;

  // unit part u = x * p^(-v)
  Rat u = x;
  Rat pr(ctx.p);
  for (long long i = 0; i < v; ++i) u /= pr;
  for (long long i = 0; i < -v; ++i) u *= pr;

  long long gamma = int_valuation(Int(j), ctx.p);
  Int modulus = 1;
  for (long long i = 0; i < 1 + 2 * gamma; ++i) modulus *= ctx.p;

  Int un = numerator(u) % modulus;
  if (un < 0) un += modulus;
  Int ud = denominator(u) % modulus;
  Int target = un * mod_inverse(ud, modulus) % modulus;

  for (Int y = 1; y < modulus; ++y) {
    if (y % ctx.p == 0) continue;
    if (mod_pow(y, j, modulus) == target) return true;
  }
  return false;
}

// Residue class t mod t_modulus inside the cyclic root-of-unity group of
// order group_order; zeta = g^t for a generator g.
struct ZetaSolution {
  long long t_residue;
  long long t_modulus;
  long long group_order;
};

// Decides existence of a root of unity zeta in Q_p with zeta^(m-1) = 1 and
// zeta^k = eps_k for sign constraints eps_k in {+1,-1}.  The root-of-unity
// group of Q_p is cyclic of order M = p-1 (p odd) or M = 2 (p = 2); the
// constraints become linear congruences on the discrete logarithm t.
inline std::optional<ZetaSolution> solve_zeta_constraints(
    const std::vector<std::pair<long long, int>>& constraints,
    long long order_divisor, const PrimeContext& ctx) {
  if (order_divisor < 1) throw std::invalid_argument("order_divisor must be >= 1");
  long long M = (ctx.p == 2) ? 2 : Int(ctx.p - 1).convert_to<long long>();

  // Solution set maintained as t = residue (mod modulus).
  long long residue = 0, modulus = 1;
  auto add_congruence = [&](long long a, long long b) -> bool {
    // a t = b (mod M), intersected with the current class.
    a %= M;
    b %= M;
    if (b < 0) b += M;
    long long g = std::gcd(a, M);
    if (g == 0) return b == 0;
    if (b % g != 0) return false;
    long long m2 = M / g;
    long long inv = Int(mod_inverse(Int(a / g), Int(m2))).convert_to<long long>();
    long long r2 = (b / g) % m2 * inv % m2;
    // merge t = residue (mod modulus) with t = r2 (mod m2)
    long long gg = std::gcd(modulus, m2);
    if ((r2 - residue) % gg != 0) return false;
    long long lcm = modulus / gg * m2;
    // CRT lift
    Int diff = Int(r2 - residue) / gg;
    Int step = Int(modulus) * (diff * mod_inverse(Int(modulus / gg), Int(m2 / gg)) % (m2 / gg));
    long long r = ((Int(residue) + step) % lcm).convert_to<long long>();
    if (r < 0) r += lcm;
    residue = r;
    modulus = lcm;
    return true;
  };

  if (!add_congruence(order_divisor, 0)) return std::nullopt;
  for (const auto& [k, eps] : constraints) {
    if (eps != 1 && eps != -1)
      throw std::invalid_argument("constraint sign must be +1 or -1");
    long long b = 0;
    if (eps == -1) {
      if (M % 2 != 0) return std::nullopt;  // -1 not in an odd-order group
      b = M / 2;
    }
    if (!add_congruence(k, b)) return std::nullopt;
  }
  return ZetaSolution{residue, modulus, M};
}

// Canonical "num/den" text form ("-3/8"; integers without the "/1").
inline std::string rat_to_string(const Rat& x) {
  std::string s = numerator(x).str();
  if (denominator(x) != 1) s += "/" + denominator(x).str();
  return s;
}

inline Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(Int(s));
  Int num(s.substr(0, slash));
  Int den(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("parse_rat: zero denominator");
  return Rat(num, den);
}

}  // namespace nad
