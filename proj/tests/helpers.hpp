// Deterministic random generators shared by the test suites.
#pragma once

#include <random>
#include <vector>

#include "nad/series.hpp"

namespace testutil {

using nad::FormalMap;
using nad::Idx;
using nad::Rat;
using nad::Series;

// Random two-variable map with the given eigenvalues and small integer tail
// coefficients (a sparse selection of indices with total degree in [2, N]).
inline FormalMap random_integral_map(std::mt19937& rng, unsigned N,
                                     const std::vector<Rat>& eig, int coeff_range = 3,
                                     int keep_percent = 40) {
  FormalMap F(2, N, eig);
  std::uniform_int_distribution<int> coeff(-coeff_range, coeff_range);
  std::uniform_int_distribution<int> keep(0, 99);
  for (unsigned d = 2; d <= N; ++d) {
    for (unsigned i = 0; i <= d; ++i) {
      for (int k = 0; k < 2; ++k) {
        if (keep(rng) >= keep_percent) continue;
        int c = coeff(rng);
        if (c != 0) F.set_tail_coeff(k, Idx{i, d - i}, Rat(c));
      }
    }
  }
  return F;
}

// Random tangent-to-identity two-variable map with unit eigenvalues,
// usable as a conjugating change of variables.
inline FormalMap random_integral_conjugator(std::mt19937& rng, unsigned N,
                                            int coeff_range = 2, int keep_percent = 30) {
  return random_integral_map(rng, N, {Rat(1), Rat(1)}, coeff_range, keep_percent);
}

// Random one-variable tangent-to-identity series with integer coefficients
// and a guaranteed nonlinear term.
inline Series random_tangent_series(std::mt19937& rng, unsigned N, int coeff_range = 3) {
  Series f(1, N);
  f.set_coeff(Idx{1, 0}, Rat(1));
  std::uniform_int_distribution<int> coeff(-coeff_range, coeff_range);
  bool nonlinear = false;
  for (unsigned d = 2; d <= N; ++d) {
    int c = coeff(rng);
    if (c != 0) {
      f.set_coeff(Idx{d, 0}, Rat(c));
      nonlinear = true;
    }
  }
  if (!nonlinear) f.set_coeff(Idx{2, 0}, Rat(1));
  return f;
}

}  // namespace testutil
