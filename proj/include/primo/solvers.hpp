#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "primo/data.hpp"
#include "primo/linalg.hpp"
#include "primo/privacy.hpp"
#include "primo/rng.hpp"

namespace primo {

/// How the association term (1/n) X^T Y is released.
enum class Mechanism { none, gauss, projection };

std::string_view to_string(Mechanism m);

struct SolverConfig {
  double lambda = 0.0;
  PrivacyBudget budget{1.0, 1e-6};
  Mechanism mechanism = Mechanism::gauss;
  std::optional<Index> subsample_s;
  std::uint64_t seed = 0;
};

struct PhaseTimes {
  double covariance_ms = 0.0;
  double mechanism_ms = 0.0;
  double solve_ms = 0.0;

  double total_ms() const { return covariance_ms + mechanism_ms + solve_ms; }
};

struct PrimoSolution {
  Matrix w_hat;  // d x l
  double sigma_cov = 0.0;
  /// Gaussian mechanism sigma, or the projection mechanism noise scale r.
  double sigma_assoc_or_r = 0.0;
  Mechanism mechanism = Mechanism::gauss;
  PhaseTimes wall_times;
  std::uint64_t seed = 0;
  /// Number of noisy-covariance draws plus QR factorizations performed.
  int covariance_factorizations = 0;
  /// Rows used for the covariance (n unless subsampled).
  Index covariance_rows = 0;
};

/// Ridge (lambda > 0) or OLS (lambda = 0) estimator
/// ((1/n) X^T X + lambda I)^{-1} (1/n) X^T Y via QR and back substitution.
/// Throws SingularSystemError when the system is singular.
Matrix ols_ridge_solve(const DesignMatrix& x, const OutcomeMatrix& y, double lambda);

/// (1/n) X^T X, exactly symmetric.
Matrix form_covariance(const DesignMatrix& x);

struct NoisyCovariance {
  Matrix i_hat;
  QRFactors qr;
  double sigma = 0.0;
};

/// I_hat = (1/n) X^T X + E_1 + lambda I with E_1 symmetric Gaussian at
/// sigma_1 = c(b_half) * covariance_sensitivity(x_bound, n), plus its QR.
NoisyCovariance noisy_covariance(const DesignMatrix& x, double lambda, const PrivacyBudget& b_half,
                                 Rng& rng);

/// lambda-ReuseCov: one noisy covariance and QR shared by all l regressions.
///
/// The covariance and the association term each spend (eps/2, delta/2).
/// Gauss: v_hat = (1/n) X^T Y + N(0, sigma_2^2) with sigma_2 from the
/// association sensitivity; column j's noise comes from the stream keyed by
/// its column id. Projection: v_hat from the inner product projection
/// mechanism. None: no noise anywhere (ridge through the same code path).
/// A noisy I_hat that is numerically singular surfaces as SingularSystemError;
/// noise is never redrawn.
PrimoSolution reuse_cov(const DesignMatrix& x, const OutcomeMatrix& y, const SolverConfig& cfg);

/// lambda-SubSampReuseCov: covariance from s rows drawn uniformly without
/// replacement at the amplified budget ((n/s) eps/2, delta/2); the association
/// term still uses all n rows at (eps/2, delta/2). For s = n all rows are used
/// in their original order, which reproduces reuse_cov exactly.
PrimoSolution subsample_reuse_cov(const DesignMatrix& x, const OutcomeMatrix& y,
                                  const SolverConfig& cfg);

/// Naive baseline: l independent SSP regressions, each with a fresh noisy
/// covariance and a fresh association draw at (eps/(2 sqrt l), delta/(2 l))
/// per half.
PrimoSolution naive_ssp_baseline(const DesignMatrix& x, const OutcomeMatrix& y, double lambda,
                                 const PrivacyBudget& b, std::uint64_t seed);

/// ||X W - Y||_F^2
double squared_loss(const DesignMatrix& x, const OutcomeMatrix& y, const Matrix& w);

/// (1/(n l)) (||X W_hat - Y||_F^2 - ||X W_star - Y||_F^2)
double excess_loss(const DesignMatrix& x, const OutcomeMatrix& y, const Matrix& w_hat,
                   const Matrix& w_star);

/// ||X W_hat - Y||_F^2 / ||X W_ref - Y||_F^2
double loss_ratio(const DesignMatrix& x, const OutcomeMatrix& y, const Matrix& w_hat,
                  const Matrix& w_ref);

/// Regularization used for the reference optimum when X^T X is singular.
inline constexpr double kLambdaFloor = 1e-10;

/// Unregularized OLS optimum, falling back to lambda = kLambdaFloor when the
/// normal equations are singular.
Matrix reference_solution(const DesignMatrix& x, const OutcomeMatrix& y);

}  // namespace primo
