#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "primo/errors.hpp"
#include "primo/privacy.hpp"

using namespace primo;

namespace {

double sample_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Two-sided Kolmogorov-Smirnov statistic against N(0, sigma^2).
double ks_statistic(std::vector<double> v, double sigma) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = normal_cdf(v[i] / sigma);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace

TEST_CASE("PrivacyBudget validation") {
  CHECK_NOTHROW(PrivacyBudget(1.0, 0.5));
  CHECK_THROWS_AS(PrivacyBudget(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(PrivacyBudget(-1.0, 0.5), DomainError);
  CHECK_THROWS_AS(PrivacyBudget(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(PrivacyBudget(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(PrivacyBudget(std::nan(""), 0.5), DomainError);
  const PrivacyBudget h = PrivacyBudget(3.0, 0.2).halved();
  CHECK(h.epsilon() == 1.5);
  CHECK(h.delta() == 0.1);
}

TEST_CASE("calibration_constant closed forms") {
  CHECK(calibration_constant({1.0, std::exp(-1.0)}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(calibration_constant({2.0, std::exp(-4.0)}) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  const double delta = 1.0 / (5008.0 * 5008.0);
  const double expected = std::sqrt(2.0 * (1.0 / 5.0 + std::log(1.0 / delta) / 25.0));
  CHECK(calibration_constant({5.0, delta}) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(calibration_constant({5.0, delta}) == doctest::Approx(1.3278).epsilon(1e-4));
  // Valid beyond eps = 1.
  CHECK(calibration_constant({100.0, 1e-6}) == doctest::Approx(std::sqrt(2.0 * (0.01 + std::log(1e6) / 1e4))));
}

TEST_CASE("calibration_constant is strictly decreasing in epsilon and delta") {
  double prev = std::numeric_limits<double>::infinity();
  for (double eps = 0.01; eps < 1000.0; eps *= 1.7) {
    const double c = calibration_constant({eps, 1e-5});
    CHECK(c < prev);
    prev = c;
  }
  prev = std::numeric_limits<double>::infinity();
  for (double delta = 1e-12; delta < 0.99; delta *= 3.0) {
    const double c = calibration_constant({1.0, delta});
    CHECK(c < prev);
    prev = c;
  }
}

TEST_CASE("gaussian_vector_mech: zero sensitivity is the identity") {
  Rng rng(1);
  Vector v = Vector::LinSpaced(7, -3.0, 3.0);
  const auto [out, spec] = gaussian_vector_mech(v, {0.0}, {1.0, 0.1}, rng);
  CHECK(out == v);
  CHECK(spec.sigma == 0.0);
}

TEST_CASE("gaussian_vector_mech: huge epsilon barely perturbs") {
  Rng rng(2);
  const double sens = 0.7;
  const PrivacyBudget b(1e9, 1e-6);
  const double sigma = calibration_constant(b) * sens;
  // P(|N(0, sigma^2)| > t) <= exp(-t^2 / (2 sigma^2)); with t = 1e-3 sens the
  // union bound over 1000 coordinates is far below 1e-6.
  CHECK(1000.0 * std::exp(-std::pow(1e-3 * sens / sigma, 2) / 2.0) < 1e-6);
  const Vector v = Vector::Zero(1000);
  const auto [out, spec] = gaussian_vector_mech(v, {sens}, b, rng);
  CHECK(spec.sigma == doctest::Approx(sigma));
  CHECK(out.cwiseAbs().maxCoeff() < 1e-3 * sens);
}

TEST_CASE("gaussian_vector_mech: empirical std matches sigma = 2") {
  Rng rng(3);
  const auto [out, spec] = gaussian_vector_mech(Vector::Zero(100000), {1.0}, {1.0, std::exp(-1.0)}, rng);
  CHECK(spec.sigma == doctest::Approx(2.0));
  const double s = sample_std({out.data(), out.data() + out.size()});
  CHECK(s >= 1.98);
  CHECK(s <= 2.02);
}

TEST_CASE("gaussian_vector_mech is bit reproducible") {
  const Vector v = Vector::LinSpaced(50, 0.0, 1.0);
  Rng a = Rng::stream(99, StreamPurpose::association, 4);
  Rng b = Rng::stream(99, StreamPurpose::association, 4);
  const auto ra = gaussian_vector_mech(v, {0.3}, {0.5, 1e-4}, a);
  const auto rb = gaussian_vector_mech(v, {0.3}, {0.5, 1e-4}, b);
  CHECK(ra.first == rb.first);
  Rng c = Rng::stream(99, StreamPurpose::association, 5);
  CHECK(gaussian_vector_mech(v, {0.3}, {0.5, 1e-4}, c).first != ra.first);
}

TEST_CASE("symmetric_gaussian_noise: degenerate and symmetric") {
  Rng rng(4);
  CHECK(symmetric_gaussian_noise(5, 0.0, rng).isZero());
  for (Index d : {1, 2, 9, 40}) {
    const Matrix e = symmetric_gaussian_noise(d, 1.3, rng);
    CHECK(e == e.transpose());
  }
}

TEST_CASE("symmetric_gaussian_noise: entry variance and KS on the diagonal") {
  Rng rng(5);
  std::vector<double> off;
  std::vector<double> diag;
  off.reserve(10000);
  diag.reserve(10000);
  for (int t = 0; t < 10000; ++t) {
    const Matrix e = symmetric_gaussian_noise(50, 1.0, rng);
    off.push_back(e(0, 1));
    diag.push_back(e(7, 7));
  }
  const double var = std::pow(sample_std(off), 2);
  CHECK(var >= 0.97);
  CHECK(var <= 1.03);
  // Critical value of the KS statistic at significance 0.001.
  CHECK(ks_statistic(diag, 1.0) < 1.9495 / std::sqrt(10000.0));
  CHECK(ks_statistic(off, 1.0) < 1.9495 / std::sqrt(10000.0));
}

TEST_CASE("covariance_sensitivity values") {
  CHECK(covariance_sensitivity(1.0, 1).l2 == doctest::Approx(std::sqrt(2.0)));
  CHECK(covariance_sensitivity(2.0, 100).l2 == doctest::Approx(0.04 * std::sqrt(2.0)));
  CHECK(covariance_sensitivity(0.0, 5).l2 == 0.0);
  CHECK(covariance_sensitivity_value(3.0, 9) == covariance_sensitivity(3.0, 9).l2);
}

TEST_CASE("covariance_sensitivity is attained by orthogonal rows") {
  Matrix x = Matrix::Zero(2, 2);
  Matrix x2 = x;
  x(0, 0) = 1.0;
  x2(0, 1) = 1.0;
  const double dev = (x.transpose() * x - x2.transpose() * x2).norm() / 2.0;
  CHECK(dev == doctest::Approx(covariance_sensitivity(1.0, 2).l2));
}

TEST_CASE("covariance_sensitivity dominates a brute force sweep") {
  const double bound = 1.5;
  const Index n = 5;
  const double observed = oracle::sensitivity_sweep(
      [n](const Matrix& x, const Matrix&) { return Matrix(x.transpose() * x / double(n)); },
      oracle::replace_one_generator(n, 3, 1, bound, 1.0), 1000, 7);
  CHECK(observed > 0.0);
  CHECK(observed <= covariance_sensitivity(bound, n).l2 * (1.0 + 1e-12));
}

TEST_CASE("association_sensitivity values") {
  CHECK(association_sensitivity(1.0, 1.0, 1, 2).l2 == doctest::Approx(1.0));
  CHECK(association_sensitivity(3.0, 0.5, 4, 10).l2 == doctest::Approx(0.6));
  CHECK(association_sensitivity(0.0, 0.5, 4, 10).l2 == 0.0);
}

TEST_CASE("association_sensitivity dominates a brute force sweep") {
  const double xb = 2.0;
  const double yb = 0.5;
  const Index n = 6;
  const double observed = oracle::sensitivity_sweep(
      [n](const Matrix& x, const Matrix& y) { return Matrix(x.transpose() * y / double(n)); },
      oracle::replace_one_generator(n, 2, 3, xb, yb), 1000, 8);
  CHECK(observed > 0.0);
  CHECK(observed <= association_sensitivity(xb, yb, 3, n).l2 * (1.0 + 1e-12));
}

TEST_CASE("subsample_amplified_budget") {
  const double delta = 1e-4;
  PrivacyBudget b = subsample_amplified_budget({1.0, delta}, 100, 100);
  CHECK(b.epsilon() == doctest::Approx(0.5));
  CHECK(b.delta() == doctest::Approx(delta / 2));
  b = subsample_amplified_budget({1.0, delta}, 100, 50);
  CHECK(b.epsilon() == doctest::Approx(1.0));
  CHECK(b.delta() == doctest::Approx(delta / 2));
  b = subsample_amplified_budget({2.0, delta}, 100, 25);
  CHECK(b.epsilon() == doctest::Approx(4.0));
  CHECK_THROWS_AS(subsample_amplified_budget({1.0, delta}, 100, 101), DomainError);
  CHECK_THROWS_AS(subsample_amplified_budget({1.0, delta}, 100, 0), DomainError);
}
