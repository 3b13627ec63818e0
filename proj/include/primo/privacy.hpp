#pragma once

#include <cstdint>
#include <utility>

#include "primo/linalg.hpp"
#include "primo/rng.hpp"

namespace primo {

/// (epsilon, delta) with epsilon > 0 and 0 < delta < 1.
class PrivacyBudget {
 public:
  PrivacyBudget(double epsilon, double delta);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

  /// Each half of a basic-composition split: (epsilon/2, delta/2).
  PrivacyBudget halved() const { return {epsilon_ / 2.0, delta_ / 2.0}; }

 private:
  double epsilon_;
  double delta_;
};

struct SensitivityBound {
  double l2 = 0.0;
};

struct NoiseSpec {
  double sigma = 0.0;
};

/// c(eps, delta) = sqrt(2 (1/eps + ln(1/delta) / eps^2)).
/// Adding N(0, (c * Delta)^2) per coordinate is (eps, delta)-DP for a
/// statistic of l2-sensitivity Delta.
double calibration_constant(const PrivacyBudget& b);

/// Gaussian mechanism: value + N(0, sigma^2) i.i.d. with sigma = c(b) * sens.
std::pair<Vector, NoiseSpec> gaussian_vector_mech(const Vector& value, SensitivityBound sens,
                                                  const PrivacyBudget& b, Rng& rng);

/// Symmetric d x d matrix whose upper triangle (diagonal included) holds
/// i.i.d. N(0, sigma^2) draws, mirrored below the diagonal. Entries are drawn
/// row by row over j >= i.
Matrix symmetric_gaussian_noise(Index d, double sigma, Rng& rng);

/// Replace-one l2-sensitivity of (1/n) X^T X over rows with norm <= x_bound:
/// sqrt(2) * x_bound^2 / n. The sqrt(2) is attained by two orthogonal rows of
/// maximal norm, since ||x x^T - z z^T||_F^2 = ||x||^4 + ||z||^4 - 2 (x.z)^2.
double covariance_sensitivity_value(double x_bound, Index n);
SensitivityBound covariance_sensitivity(double x_bound, Index n);

/// Replace-one l2-sensitivity of (1/n) X^T Y with |y_ij| <= y_bound:
/// 2 sqrt(l) x_bound y_bound / n.
SensitivityBound association_sensitivity(double x_bound, double y_bound, Index l, Index n);

/// Budget to spend on a uniform subsample of s out of n rows so that, after
/// amplification by the secrecy of the subsample, the cost is about
/// (eps/2, delta/2): returns ((n/s) eps / 2, delta / 2).
/// Throws DomainError unless 1 <= s <= n.
PrivacyBudget subsample_amplified_budget(const PrivacyBudget& b, Index n, Index s);

}  // namespace primo
