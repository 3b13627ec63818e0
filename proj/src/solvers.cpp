#include "primo/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "primo/errors.hpp"
#include "primo/query_release.hpp"

namespace primo {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void require_same_rows(const DesignMatrix& x, const OutcomeMatrix& y) {
  if (x.n() != y.n()) {
    throw DimensionError("X has " + std::to_string(x.n()) + " rows but Y has " +
                         std::to_string(y.n()));
  }
}

Matrix association(const DesignMatrix& x, const OutcomeMatrix& y) {
  return (1.0 / static_cast<double>(x.n())) * (x.values().transpose() * y.values());
}

Matrix covariance_of(const Matrix& rows) {
  const Index d = rows.cols();
  Matrix c = Matrix::Zero(d, d);
  c.selfadjointView<Eigen::Lower>().rankUpdate(rows.transpose(), 1.0 / static_cast<double>(rows.rows()));
  c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
  return c;
}

// cov + E_1 + lambda I and its QR.
NoisyCovariance perturb_and_factor(const Matrix& cov, double lambda, double sigma, Rng& rng) {
  NoisyCovariance out;
  out.sigma = sigma;
  out.i_hat = cov;
  if (sigma > 0.0) out.i_hat += symmetric_gaussian_noise(cov.rows(), sigma, rng);
  out.i_hat.diagonal().array() += lambda;
  out.qr = qr_decompose(out.i_hat);
  return out;
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("lambda must be finite and nonnegative");
  }
}

// Gaussian release of the association term; column j uses the stream keyed by
// its column id.
Matrix gauss_association(const DesignMatrix& x, const OutcomeMatrix& y, const PrivacyBudget& half,
                         std::uint64_t seed, double* sigma) {
  Matrix v = association(x, y);
  const SensitivityBound sens = association_sensitivity(x.x_bound(), y.y_bound(), y.l(), x.n());
  for (Index j = 0; j < y.l(); ++j) {
    Rng rng = Rng::stream(seed, StreamPurpose::association,
                          y.column_ids()[static_cast<std::size_t>(j)]);
    auto [noisy, spec] = gaussian_vector_mech(v.col(j), sens, half, rng);
    v.col(j) = noisy;
    *sigma = spec.sigma;
  }
  return v;
}

struct CovarianceInput {
  Matrix cov;
  double sigma = 0.0;
  Index rows = 0;
};

PrimoSolution solve_shared(const DesignMatrix& x, const OutcomeMatrix& y, const SolverConfig& cfg,
                           const CovarianceInput& input, Clock::time_point cov_start) {
  PrimoSolution sol;
  sol.mechanism = cfg.mechanism;
  sol.seed = cfg.seed;
  sol.covariance_rows = input.rows;

  Rng cov_rng = Rng::stream(cfg.seed, StreamPurpose::covariance, 0);
  const NoisyCovariance noisy = perturb_and_factor(input.cov, cfg.lambda, input.sigma, cov_rng);
  sol.sigma_cov = noisy.sigma;
  sol.covariance_factorizations = 1;
  sol.wall_times.covariance_ms = elapsed_ms(cov_start);

  const PrivacyBudget half = cfg.budget.halved();
  auto start = Clock::now();
  Matrix v_hat;
  switch (cfg.mechanism) {
    case Mechanism::none:
      v_hat = association(x, y);
      break;
    case Mechanism::gauss:
      v_hat = gauss_association(x, y, half, cfg.seed, &sol.sigma_assoc_or_r);
      break;
    case Mechanism::projection: {
      const ProjectionRelease release = projection_mechanism(x, y, half, cfg.seed);
      sol.sigma_assoc_or_r = release.noise_scale;
      // answers are (1/n) Y^T X in l x d column-major storage
      v_hat = Eigen::Map<const Matrix>(release.answers.data(), y.l(), x.d()).transpose();
      break;
    }
  }
  sol.wall_times.mechanism_ms = elapsed_ms(start);

  start = Clock::now();
  sol.w_hat = qr_solve(noisy.qr, v_hat);
  sol.wall_times.solve_ms = elapsed_ms(start);
  return sol;
}

}  // namespace

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::none:
      return "none";
    case Mechanism::gauss:
      return "gauss";
    case Mechanism::projection:
      return "proj";
  }
  return "unknown";
}

Matrix form_covariance(const DesignMatrix& x) { return covariance_of(x.values()); }

Matrix ols_ridge_solve(const DesignMatrix& x, const OutcomeMatrix& y, double lambda) {
  require_same_rows(x, y);
  check_lambda(lambda);
  Matrix a = form_covariance(x);
  a.diagonal().array() += lambda;
  return qr_solve(qr_decompose(a), association(x, y));
}

NoisyCovariance noisy_covariance(const DesignMatrix& x, double lambda, const PrivacyBudget& b_half,
                                 Rng& rng) {
  check_lambda(lambda);
  const double sigma =
      calibration_constant(b_half) * covariance_sensitivity(x.x_bound(), x.n()).l2;
  return perturb_and_factor(form_covariance(x), lambda, sigma, rng);
}

PrimoSolution reuse_cov(const DesignMatrix& x, const OutcomeMatrix& y, const SolverConfig& cfg) {
  require_same_rows(x, y);
  check_lambda(cfg.lambda);
  const auto start = Clock::now();
  CovarianceInput input;
  input.cov = form_covariance(x);
  input.rows = x.n();
  if (cfg.mechanism != Mechanism::none) {
    input.sigma = calibration_constant(cfg.budget.halved()) *
                  covariance_sensitivity(x.x_bound(), x.n()).l2;
  }
  return solve_shared(x, y, cfg, input, start);
}

PrimoSolution subsample_reuse_cov(const DesignMatrix& x, const OutcomeMatrix& y,
                                  const SolverConfig& cfg) {
  require_same_rows(x, y);
  check_lambda(cfg.lambda);
  if (!cfg.subsample_s) throw DomainError("subsample_reuse_cov: subsample size not set");
  const Index n = x.n();
  const Index s = *cfg.subsample_s;
  const PrivacyBudget amplified = subsample_amplified_budget(cfg.budget, n, s);

  const auto start = Clock::now();
  CovarianceInput input;
  input.rows = s;
  if (s == n) {
    input.cov = form_covariance(x);
  } else {
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    std::vector<Index> picked;
    picked.reserve(static_cast<std::size_t>(s));
    Rng rng = Rng::stream(cfg.seed, StreamPurpose::subsample, 0);
    std::sample(all.begin(), all.end(), std::back_inserter(picked), s, rng.engine());
    input.cov = form_covariance(x.select_rows(picked));
  }
  if (cfg.mechanism != Mechanism::none) {
    input.sigma = calibration_constant(amplified) * covariance_sensitivity(x.x_bound(), s).l2;
  }
  return solve_shared(x, y, cfg, input, start);
}

PrimoSolution naive_ssp_baseline(const DesignMatrix& x, const OutcomeMatrix& y, double lambda,
                                 const PrivacyBudget& b, std::uint64_t seed) {
  require_same_rows(x, y);
  check_lambda(lambda);
  const Index l = y.l();
  const Index d = x.d();
  const double root_l = std::sqrt(static_cast<double>(l));
  const PrivacyBudget per_regression(b.epsilon() / root_l, b.delta() / static_cast<double>(l));
  const PrivacyBudget half = per_regression.halved();
  const double c = calibration_constant(half);
  const double sigma_cov = c * covariance_sensitivity(x.x_bound(), x.n()).l2;
  const SensitivityBound assoc_sens = association_sensitivity(x.x_bound(), y.y_bound(), 1, x.n());

  PrimoSolution sol;
  sol.mechanism = Mechanism::gauss;
  sol.seed = seed;
  sol.covariance_rows = x.n();
  sol.sigma_cov = sigma_cov;
  sol.w_hat.resize(d, l);

  auto start = Clock::now();
  const Matrix cov = form_covariance(x);
  const Matrix assoc = association(x, y);
  sol.wall_times.covariance_ms += elapsed_ms(start);

  for (Index j = 0; j < l; ++j) {
    const std::uint64_t id = y.column_ids()[static_cast<std::size_t>(j)];

    start = Clock::now();
    Rng cov_rng = Rng::stream(seed, StreamPurpose::covariance, id);
    const NoisyCovariance noisy = perturb_and_factor(cov, lambda, sigma_cov, cov_rng);
    ++sol.covariance_factorizations;
    sol.wall_times.covariance_ms += elapsed_ms(start);

    start = Clock::now();
    Rng assoc_rng = Rng::stream(seed, StreamPurpose::association, id);
    auto [v, spec] = gaussian_vector_mech(assoc.col(j), assoc_sens, half, assoc_rng);
    sol.sigma_assoc_or_r = spec.sigma;
    sol.wall_times.mechanism_ms += elapsed_ms(start);

    start = Clock::now();
    const Matrix rhs = v;
    sol.w_hat.col(j) = qr_solve(noisy.qr, rhs);
    sol.wall_times.solve_ms += elapsed_ms(start);
  }
  return sol;
}

double squared_loss(const DesignMatrix& x, const OutcomeMatrix& y, const Matrix& w) {
  require_same_rows(x, y);
  if (w.rows() != x.d() || w.cols() != y.l()) {
    throw DimensionError("coefficient matrix must be " + std::to_string(x.d()) + "x" +
                         std::to_string(y.l()));
  }
  return (x.values() * w - y.values()).squaredNorm();
}

double excess_loss(const DesignMatrix& x, const OutcomeMatrix& y, const Matrix& w_hat,
                   const Matrix& w_star) {
  const double scale = 1.0 / (static_cast<double>(x.n()) * static_cast<double>(y.l()));
  return scale * (squared_loss(x, y, w_hat) - squared_loss(x, y, w_star));
}

double loss_ratio(const DesignMatrix& x, const OutcomeMatrix& y, const Matrix& w_hat,
                  const Matrix& w_ref) {
  return squared_loss(x, y, w_hat) / squared_loss(x, y, w_ref);
}

Matrix reference_solution(const DesignMatrix& x, const OutcomeMatrix& y) {
  try {
    return ols_ridge_solve(x, y, 0.0);
  } catch (const SingularSystemError&) {
    return ols_ridge_solve(x, y, kLambdaFloor);
  }
}

}  // namespace primo
