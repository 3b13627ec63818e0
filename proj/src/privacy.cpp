#include "primo/privacy.hpp"

#include <cmath>
#include <string>

#include "primo/errors.hpp"

namespace primo {

PrivacyBudget::PrivacyBudget(double epsilon, double delta) : epsilon_(epsilon), delta_(delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("privacy budget: epsilon must be positive and finite, got " +
                      std::to_string(epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("privacy budget: delta must lie in (0, 1), got " + std::to_string(delta));
  }
}

double calibration_constant(const PrivacyBudget& b) {
  const double eps = b.epsilon();
  return std::sqrt(2.0 * (1.0 / eps + std::log(1.0 / b.delta()) / (eps * eps)));
}

std::pair<Vector, NoiseSpec> gaussian_vector_mech(const Vector& value, SensitivityBound sens,
                                                  const PrivacyBudget& b, Rng& rng) {
  if (!(sens.l2 >= 0.0) || !std::isfinite(sens.l2)) {
    throw DomainError("gaussian_vector_mech: sensitivity must be finite and nonnegative");
  }
  const NoiseSpec noise{calibration_constant(b) * sens.l2};
  Vector out = value;
  if (noise.sigma == 0.0) return {out, noise};
  for (Index i = 0; i < out.size(); ++i) out[i] += noise.sigma * rng.normal();
  return {out, noise};
}

Matrix symmetric_gaussian_noise(Index d, double sigma, Rng& rng) {
  if (d < 1) throw DomainError("symmetric_gaussian_noise: d must be at least 1");
  if (!(sigma >= 0.0)) throw DomainError("symmetric_gaussian_noise: sigma must be nonnegative");
  Matrix e = Matrix::Zero(d, d);
  if (sigma == 0.0) return e;
  for (Index i = 0; i < d; ++i) {
    for (Index j = i; j < d; ++j) {
      const double z = sigma * rng.normal();
      e(i, j) = z;
      e(j, i) = z;
    }
  }
  return e;
}

double covariance_sensitivity_value(double x_bound, Index n) {
  if (!(x_bound >= 0.0) || n < 1) {
    throw DomainError("covariance_sensitivity: need x_bound >= 0 and n >= 1");
  }
  return std::sqrt(2.0) * x_bound * x_bound / static_cast<double>(n);
}

SensitivityBound covariance_sensitivity(double x_bound, Index n) {
  return {covariance_sensitivity_value(x_bound, n)};
}

SensitivityBound association_sensitivity(double x_bound, double y_bound, Index l, Index n) {
  if (!(x_bound >= 0.0) || !(y_bound >= 0.0) || l < 0 || n < 1) {
    throw DomainError("association_sensitivity: bounds must be nonnegative and n >= 1");
  }
  return {2.0 * std::sqrt(static_cast<double>(l)) * x_bound * y_bound / static_cast<double>(n)};
}

PrivacyBudget subsample_amplified_budget(const PrivacyBudget& b, Index n, Index s) {
  if (s < 1 || s > n) {
    throw DomainError("subsample_amplified_budget: need 1 <= s <= n, got s = " +
                      std::to_string(s) + ", n = " + std::to_string(n));
  }
  const double ratio = static_cast<double>(n) / static_cast<double>(s);
  return {ratio * b.epsilon() / 2.0, b.delta() / 2.0};
}

}  // namespace primo
