#pragma once

#include <cmath>

#include "oracles.hpp"
#include "primo/data.hpp"
#include "primo/rng.hpp"

namespace primo::testing {

inline Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline Vector random_vector(Index size, Rng& rng) { return random_matrix(size, 1, rng); }

// Rows drawn uniformly from the ball of radius x_bound.
inline DesignMatrix random_design(Index n, Index d, double x_bound, Rng& rng) {
  Matrix x(n, d);
  for (Index i = 0; i < n; ++i) x.row(i) = oracle::random_in_ball(d, x_bound, rng).transpose();
  return {x, x_bound};
}

inline OutcomeMatrix random_outcomes(Index n, Index l, Rng& rng) {
  return OutcomeMatrix::with_empirical_bound(random_matrix(n, l, rng));
}

inline Index random_size(Index lo, Index hi, Rng& rng) {
  return lo + static_cast<Index>(rng.uniform() * static_cast<double>(hi - lo + 1)) % (hi - lo + 1);
}

}  // namespace primo::testing
