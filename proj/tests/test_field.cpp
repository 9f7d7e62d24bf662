#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nad/scalar.hpp"

using namespace nad;

TEST_CASE("valuation basics") {
  PrimeContext p2{Int(2)};
  CHECK(valuation(Rat(24), p2) == 3);
  CHECK(valuation(Rat(0), p2) == kValInfinity);
  CHECK(valuation(Rat(3, 4), p2) == -2);
  PrimeContext p5{Int(5)};
  CHECK(valuation(Rat(50), p5) == 2);
  CHECK(valuation(Rat(1, 125), p5) == -3);
}

TEST_CASE("prime context rejects composites") {
  CHECK_THROWS_AS(PrimeContext{Int(4)}, std::invalid_argument);
  CHECK_THROWS_AS(PrimeContext{Int(1)}, std::invalid_argument);
  CHECK_NOTHROW(PrimeContext{Int(97)});
}

TEST_CASE("integrality") {
  PrimeContext p2{Int(2)};
  CHECK(is_integral(Rat(1, 3), p2));
  CHECK_FALSE(is_integral(Rat(1, 2), p2));
  CHECK(is_integral(Rat(0), p2));
}

TEST_CASE("norm comparisons and ultrametric law") {
  PrimeContext p3{Int(3)};
  CHECK(norm(Rat(0), p3).is_zero());
  CHECK(norm(Rat(9), p3) < norm(Rat(1), p3));
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> num(-60, 60);
  std::uniform_int_distribution<int> den(1, 60);
  for (int i = 0; i < 500; ++i) {
    Rat x(num(rng), den(rng)), y(num(rng), den(rng));
    NormValue nx = norm(x, p3), ny = norm(y, p3), ns = norm(x + y, p3);
    NormValue mx = nx < ny ? ny : nx;
    CHECK(ns <= mx);
    if (!(nx == ny) && x != 0 && y != 0) CHECK(ns == mx);
    // multiplicativity
    NormValue np = norm(x * y, p3);
    if (x != 0 && y != 0)
      CHECK(*np.exponent == *nx.exponent + *ny.exponent);
  }
}

TEST_CASE("Legendre formula agrees with direct factorization") {
  PrimeContext p2{Int(2)}, p5{Int(5)};
  for (unsigned n = 0; n <= 60; ++n) {
    Int fact = 1;
    for (unsigned i = 2; i <= n; ++i) fact *= i;
    CHECK(factorial_valuation(n, Int(2)) == int_valuation(fact, Int(2)));
    CHECK(factorial_valuation(n, Int(5)) == int_valuation(fact, Int(5)));
  }
  CHECK(factorial_valuation(10, Int(2)) == 8);
  CHECK(factorial_valuation(25, Int(5)) == 6);
}

TEST_CASE("factorial bound |n!| >= (1/p)^n") {
  PrimeContext p2{Int(2)}, p5{Int(5)};
  CHECK(factorial_bound_check(10, p2));
  CHECK(factorial_bound_check(0, p2));
  CHECK(factorial_bound_check(25, p5));
  for (unsigned n = 0; n <= 200; ++n) {
    CHECK(factorial_bound_check(n, p2));
    CHECK(factorial_bound_check(n, p5));
  }
}

TEST_CASE("jth power examples") {
  PrimeContext p2{Int(2)};
  CHECK(is_jth_power(Rat(9), 2, p2));
  CHECK_FALSE(is_jth_power(Rat(2), 2, p2));
  CHECK(is_jth_power(Rat(1), 7, p2));
  CHECK(is_jth_power(Rat(4), 2, p2));
  CHECK_FALSE(is_jth_power(Rat(1, 2), 2, p2));
  CHECK(is_jth_power(Rat(1, 4), 2, p2));
  CHECK_THROWS_AS(is_jth_power(Rat(0), 2, p2), std::domain_error);
}

// Brute-force cross-check: y^j = u mod p^12 with matching valuation.
static bool jth_power_brute(const Rat& x, unsigned j, const PrimeContext& ctx) {
  long long v = valuation(x, ctx);
  if (v % static_cast<long long>(j) != 0) return false;
  Rat u = x;
  Rat pr(ctx.p);
  for (long long i = 0; i < v; ++i) u /= pr;
  for (long long i = 0; i < -v; ++i) u *= pr;
  Int modulus = 1;
  for (int i = 0; i < 12; ++i) modulus *= ctx.p;
  Int un = numerator(u) % modulus;
  if (un < 0) un += modulus;
  Int target = un * mod_inverse(denominator(u) % modulus, modulus) % modulus;
  for (Int y = 1; y < modulus; ++y) {
    if (y % ctx.p == 0) continue;
    if (mod_pow(y, j, modulus) == target) return true;
  }
  return false;
}

TEST_CASE("jth power agrees with brute force") {
  for (int pv : {2, 3}) {
    PrimeContext ctx{Int(pv)};
    for (int a = 1; a <= 50; ++a) {
      for (int b = 1; b <= 50; b += 7) {
        for (unsigned j = 2; j <= 4; ++j) {
          Rat x(a, b);
          CHECK(is_jth_power(x, j, ctx) == jth_power_brute(x, j, ctx));
        }
      }
    }
  }
}

TEST_CASE("zeta constraint solver") {
  PrimeContext p5{Int(5)}, p3{Int(3)};
  // -1 is available in C4
  auto s1 = solve_zeta_constraints({{1, -1}}, 2, p5);
  REQUIRE(s1.has_value());
  CHECK(s1->group_order == 4);
  CHECK(s1->t_residue == 2);
  // zeta^2 = -1 needs t odd in C4
  auto s2 = solve_zeta_constraints({{2, -1}}, 4, p5);
  REQUIRE(s2.has_value());
  CHECK(s2->t_residue % 2 == 1);
  // over Q_3 the root-of-unity group is C2; squares are 1
  auto s3 = solve_zeta_constraints({{2, -1}}, 4, p3);
  CHECK_FALSE(s3.has_value());
  // unconstrained: always solvable with t = 0
  auto s4 = solve_zeta_constraints({}, 3, p3);
  REQUIRE(s4.has_value());
  // contradictory signs
  auto s5 = solve_zeta_constraints({{1, 1}, {1, -1}}, 2, p5);
  CHECK_FALSE(s5.has_value());
}

TEST_CASE("zeta solutions verify numerically over F_p") {
  // any reported residue class gives an actual root of unity satisfying the
  // constraints, realized in the multiplicative group mod p
  PrimeContext p13{Int(13)};
  std::vector<std::pair<long long, int>> cons{{3, -1}, {6, 1}};
  auto s = solve_zeta_constraints(cons, 6, p13);
  REQUIRE(s.has_value());
  Int g = 2;  // generator of F_13^x
  Int zeta = mod_pow(g, (12 / s->group_order) * s->t_residue, Int(13));
  CHECK(mod_pow(zeta, 6, Int(13)) == 1);
  CHECK(mod_pow(zeta, 3, Int(13)) == 12);  // -1 mod 13
}

TEST_CASE("rational string round-trip") {
  CHECK(rat_to_string(Rat(-3, 8)) == "-3/8");
  CHECK(rat_to_string(Rat(0)) == "0");
  CHECK(rat_to_string(Rat(7)) == "7");
  CHECK(parse_rat("-3/8") == Rat(-3, 8));
  CHECK(parse_rat("42") == Rat(42));
  CHECK(parse_rat(rat_to_string(Rat(22, 7))) == Rat(22, 7));
  CHECK_THROWS_AS(parse_rat("1/0"), std::invalid_argument);
}
