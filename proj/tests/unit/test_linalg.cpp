#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "primo/errors.hpp"
#include "primo/linalg.hpp"
#include "primo/rng.hpp"

using namespace primo;

namespace {

Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

// Random symmetric positive definite matrix with condition number around 10.
Matrix well_conditioned(Index d, Rng& rng) {
  Matrix a = random_matrix(d, d, rng);
  Matrix m = a * a.transpose() / static_cast<double>(d);
  m.diagonal().array() += 1.0;
  return m;
}

TrustRegionProblem random_problem(Index dim, double radius, Rng& rng) {
  TrustRegionProblem p;
  p.eigenvalues.resize(dim);
  p.rhs_coords.resize(dim);
  for (Index i = 0; i < dim; ++i) {
    p.eigenvalues(i) = rng.uniform() < 0.2 ? 0.0 : std::exp(2.0 * rng.normal());
    p.rhs_coords(i) = 3.0 * rng.normal();
  }
  std::sort(p.eigenvalues.data(), p.eigenvalues.data() + dim, std::greater<>());
  p.radius = radius;
  return p;
}

void check_qr_contract(const Matrix& a, const QRFactors& f) {
  const Index d = a.rows();
  CHECK((f.q.transpose() * f.q - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
  for (Index j = 0; j < d; ++j)
    for (Index i = j + 1; i < d; ++i) CHECK(f.r(i, j) == 0.0);
  CHECK((f.q * f.r - a).norm() <= 1e-8 * std::max(1.0, a.norm()));
}

}  // namespace

TEST_CASE("qr_decompose: identity and diagonal") {
  const Matrix eye = Matrix::Identity(3, 3);
  const QRFactors f = qr_decompose(eye);
  check_qr_contract(eye, f);
  CHECK(f.r.cwiseAbs().isApprox(eye));
  CHECK(f.q.cwiseAbs().isApprox(eye));

  Matrix d2 = Matrix::Zero(2, 2);
  d2(0, 0) = 2;
  d2(1, 1) = 3;
  const QRFactors g = qr_decompose(d2);
  check_qr_contract(d2, g);
  CHECK(std::abs(g.r(0, 0)) == doctest::Approx(2.0));
  CHECK(std::abs(g.r(1, 1)) == doctest::Approx(3.0));
  CHECK(std::abs(g.r(0, 1)) < 1e-15);
}

TEST_CASE("qr_decompose: random reconstruction") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = random_matrix(6, 6, rng);
    const QRFactors f = qr_decompose(a);
    check_qr_contract(a, f);
    CHECK((f.q * f.r - a).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("qr_decompose: singular input is accepted") {
  Matrix a = Matrix::Ones(3, 3);
  const QRFactors f = qr_decompose(a);
  check_qr_contract(a, f);
  CHECK(std::abs(f.r(2, 2)) < 1e-12);
}

TEST_CASE("qr_decompose: errors") {
  CHECK_THROWS_AS(qr_decompose(Matrix::Zero(2, 3)), DimensionError);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(qr_decompose(bad), DomainError);
}

TEST_CASE("back_substitute: hand examples") {
  Rng rng(3);
  const Vector v = random_matrix(4, 1, rng);
  CHECK(back_substitute(Matrix::Identity(4, 4), v) == v);

  Matrix r(2, 2);
  r << 2, 1, 0, 4;
  Vector rhs(2);
  rhs << 5, 8;
  const Vector w = back_substitute(r, rhs);
  CHECK(w(0) == doctest::Approx(1.5));
  CHECK(w(1) == doctest::Approx(2.0));
}

TEST_CASE("back_substitute: residual bound and LU oracle") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix r = random_matrix(10, 10, rng).triangularView<Eigen::Upper>();
    r.diagonal().array() = 1.0 + r.diagonal().array().abs();
    const Vector v = random_matrix(10, 1, rng);
    const Vector w = back_substitute(r, v);
    CHECK((r * w - v).lpNorm<Eigen::Infinity>() <= 1e-10 * (1.0 + v.lpNorm<Eigen::Infinity>()));
    const Vector lu = r.partialPivLu().solve(v);
    CHECK((w - lu).lpNorm<Eigen::Infinity>() <= 1e-9 * (1.0 + lu.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("back_substitute: singular pivot") {
  Matrix r = Matrix::Identity(3, 3);
  r(1, 1) = 1e-13;
  CHECK_THROWS_AS(back_substitute(r, Vector(Vector::Ones(3))), SingularSystemError);
  r(1, 1) = 0.0;
  CHECK_THROWS_AS(back_substitute(r, Matrix(Matrix::Ones(3, 2))), SingularSystemError);
  CHECK_THROWS_AS(back_substitute(Matrix(Matrix::Identity(3, 3)), Vector(Vector::Ones(2))), DimensionError);
}

TEST_CASE("qr solve agrees with LU up to 50x50") {
  Rng rng(17);
  for (Index d : {1, 2, 5, 13, 30, 50}) {
    const Matrix a = well_conditioned(d, rng);
    const Matrix b = random_matrix(d, 3, rng);
    const Matrix w = qr_solve(qr_decompose(a), b);
    const Matrix lu = a.partialPivLu().solve(b);
    CHECK((w - lu).norm() <= 1e-8 * lu.norm());
  }
}

TEST_CASE("thin_svd: diagonal and rank one") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 3;
  a(1, 1) = 1;
  ThinSVD s = thin_svd(a);
  CHECK(s.singular_values(0) == doctest::Approx(3.0));
  CHECK(s.singular_values(1) == doctest::Approx(1.0));

  Rng rng(9);
  Vector u = random_matrix(5, 1, rng);
  Vector v = random_matrix(3, 1, rng);
  u.normalize();
  v.normalize();
  s = thin_svd(u * v.transpose());
  REQUIRE(s.singular_values.size() == 3);
  CHECK(s.singular_values(0) == doctest::Approx(1.0));
  CHECK(s.singular_values(1) < 1e-14);
  CHECK(s.singular_values(2) < 1e-14);
}

TEST_CASE("thin_svd: contract on random shapes") {
  Rng rng(21);
  for (auto [rows, cols] : {std::pair<Index, Index>{7, 4}, {4, 7}, {1, 5}, {30, 30}, {120, 40}}) {
    const Matrix a = random_matrix(rows, cols, rng);
    const ThinSVD s = thin_svd(a);
    const Index k = std::min(rows, cols);
    REQUIRE(s.left.cols() == k);
    REQUIRE(s.right.cols() == k);
    CHECK((s.left.transpose() * s.left - Matrix::Identity(k, k)).norm() < 1e-10);
    CHECK((s.right.transpose() * s.right - Matrix::Identity(k, k)).norm() < 1e-10);
    CHECK((a - s.left * s.singular_values.asDiagonal() * s.right.transpose()).norm() <=
          1e-8 * a.norm());
    for (Index i = 1; i < k; ++i) CHECK(s.singular_values(i) <= s.singular_values(i - 1));
    CHECK(s.singular_values.minCoeff() >= 0.0);
  }
}

TEST_CASE("thin_svd: squared singular values match a^T a eigenvalues") {
  Rng rng(23);
  const Matrix a = random_matrix(7, 4, rng);
  const Vector ev = oracle::dense_symmetric_eigenvalues(a.transpose() * a);
  const Vector sv = thin_svd(a).singular_values;
  CHECK((sv.array().square().matrix() - ev).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("thin_svd: row shuffle invariance") {
  Rng rng(29);
  const Matrix a = random_matrix(12, 5, rng);
  std::vector<Index> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  Matrix b(12, 5);
  for (Index i = 0; i < 12; ++i) b.row(i) = a.row(perm[static_cast<std::size_t>(i)]);
  CHECK((thin_svd(a).singular_values - thin_svd(b).singular_values).norm() < 1e-12);
}

TEST_CASE("thin_svd: non-finite input") {
  Matrix a = Matrix::Ones(2, 2);
  a(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(thin_svd(a), DomainError);
}

TEST_CASE("trust_region_solve: interior example") {
  TrustRegionProblem p{Vector::Ones(2), Vector::Zero(2), 2.0};
  p.rhs_coords(0) = 2.0;
  const TrustRegionSolution s = trust_region_solve(p);
  CHECK(s.coords(0) == doctest::Approx(1.0));
  CHECK(s.coords(1) == 0.0);
  CHECK(s.multiplier == 0.0);
}

TEST_CASE("trust_region_solve: boundary example") {
  TrustRegionProblem p{Vector::Ones(2), Vector::Zero(2), 1.0};
  p.rhs_coords(0) = 10.0;
  const TrustRegionSolution s = trust_region_solve(p);
  CHECK(s.coords(0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(s.coords(1)) == 0.0);
  CHECK(s.multiplier == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("trust_region_solve: zero radius and zero eigenvalues") {
  TrustRegionProblem p{Vector::Zero(3), Vector::Ones(3), 0.0};
  TrustRegionSolution s = trust_region_solve(p);
  CHECK(s.coords.isZero());
  CHECK(s.multiplier == 0.0);

  // Flat direction with a linear term: the solution sits on the boundary.
  p.eigenvalues << 1.0, 0.0, 0.0;
  p.rhs_coords << 0.0, 1.0, 0.0;
  p.radius = 1.0;
  s = trust_region_solve(p);
  CHECK(s.coords(1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.coords(2) == 0.0);
  CHECK(s.multiplier == doctest::Approx(0.5).epsilon(1e-9));

  // Flat direction without a linear term stays at zero (minimum norm).
  p.rhs_coords << 1.0, 0.0, 0.0;
  s = trust_region_solve(p);
  CHECK(s.coords(0) == doctest::Approx(0.5));
  CHECK(s.coords(1) == 0.0);
  CHECK(s.coords(2) == 0.0);
}

TEST_CASE("trust_region_solve: errors") {
  TrustRegionProblem p{Vector::Ones(2), Vector::Ones(3), 1.0};
  CHECK_THROWS_AS(trust_region_solve(p), DimensionError);
  p.rhs_coords = Vector::Ones(2);
  p.eigenvalues(1) = -1.0;
  CHECK_THROWS_AS(trust_region_solve(p), DomainError);
  p.eigenvalues << 1.0, 2.0;
  CHECK_THROWS_AS(trust_region_solve(p), DomainError);
  p.eigenvalues << 2.0, 1.0;
  p.radius = -1.0;
  CHECK_THROWS_AS(trust_region_solve(p), DomainError);
}

TEST_CASE("trust_region_solve: huge radius on PD spectrum is exact") {
  Rng rng(31);
  TrustRegionProblem p = random_problem(8, 1e9, rng);
  p.eigenvalues.array() += 0.5;
  const TrustRegionSolution s = trust_region_solve(p);
  CHECK(s.multiplier == 0.0);
  for (Index i = 0; i < 8; ++i) CHECK(s.coords(i) == p.rhs_coords(i) / (2.0 * p.eigenvalues(i)));
}

TEST_CASE("trust_region_solve: projected gradient oracle on random 10-dim instances") {
  Rng rng(37);
  for (int rep = 0; rep < 5; ++rep) {
    const TrustRegionProblem p = random_problem(10, 0.2 + rng.uniform(), rng);
    const TrustRegionSolution s = trust_region_solve(p);
    const Vector pg = oracle::brute_force_trust_region(p);
    CHECK(std::abs(trust_region_objective(p, s.coords) - trust_region_objective(p, pg)) < 1e-4);
  }
}

TEST_CASE("trust_region_solve: properties on random instances") {
  Rng rng(41);
  for (int rep = 0; rep < 200; ++rep) {
    const Index dim = 1 + static_cast<Index>(rng.uniform() * 30);
    const double radius = rep % 10 == 0 ? 0.0 : std::exp(2.0 * rng.normal());
    const TrustRegionProblem p = random_problem(dim, radius, rng);
    const TrustRegionSolution s = trust_region_solve(p);
    CHECK(s.coords.norm() <= radius * (1.0 + 1e-9));
    CHECK(s.multiplier >= 0.0);

    if (s.multiplier > 0.0) {
      // Secular equation and agreement with a bisection oracle.
      CHECK(std::abs(s.coords.norm() - radius) <= 1e-10 * radius);
      CHECK(s.multiplier == doctest::Approx(oracle::bisection_multiplier(p)).epsilon(1e-7));
    }

    const double best = trust_region_objective(p, s.coords);
    for (int probe = 0; probe < 100; ++probe) {
      const Vector y = oracle::random_in_ball(dim, radius, rng);
      CHECK(best <= trust_region_objective(p, y) + 1e-12 * (1.0 + std::abs(best)));
    }
  }
}
