#include "primo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "primo/errors.hpp"

namespace primo {

bool all_finite(const Matrix& a) { return a.allFinite(); }

QRFactors qr_decompose(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionError("qr_decompose: expected a non-empty square matrix, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  if (!a.allFinite()) throw DomainError("qr_decompose: non-finite entry");

  Eigen::HouseholderQR<Matrix> qr(a);
  QRFactors out;
  out.q = qr.householderQ();
  out.r = qr.matrixQR().triangularView<Eigen::Upper>();
  return out;
}

namespace {

double pivot_floor(const Matrix& r) {
  const double largest = r.diagonal().cwiseAbs().maxCoeff();
  return kSingularityThreshold * largest;
}

void check_pivots(const Matrix& r) {
  const double floor = pivot_floor(r);
  for (Index i = 0; i < r.rows(); ++i) {
    const double p = std::abs(r(i, i));
    if (!(p > floor)) {
      throw SingularSystemError("back_substitute: pivot " + std::to_string(i) +
                                " is numerically zero (|r_ii| = " + std::to_string(p) + ")");
    }
  }
}

void check_triangular_shape(const Matrix& r, Index rhs_rows) {
  if (r.rows() != r.cols() || r.rows() == 0) {
    throw DimensionError("back_substitute: r must be a non-empty square matrix");
  }
  if (rhs_rows != r.rows()) {
    throw DimensionError("back_substitute: right hand side has " + std::to_string(rhs_rows) +
                         " rows, expected " + std::to_string(r.rows()));
  }
}

void solve_upper_in_place(const Matrix& r, double* w) {
  const Index d = r.rows();
  for (Index i = d - 1; i >= 0; --i) {
    double acc = w[i];
    for (Index j = i + 1; j < d; ++j) acc -= r(i, j) * w[j];
    w[i] = acc / r(i, i);
  }
}

}  // namespace

Vector back_substitute(const Matrix& r, const Vector& v) {
  check_triangular_shape(r, v.size());
  check_pivots(r);
  Vector w = v;
  solve_upper_in_place(r, w.data());
  return w;
}

Matrix back_substitute(const Matrix& r, const Matrix& v) {
  check_triangular_shape(r, v.rows());
  check_pivots(r);
  Matrix w = v;
  for (Index c = 0; c < w.cols(); ++c) solve_upper_in_place(r, w.col(c).data());
  return w;
}

Matrix qr_solve(const QRFactors& qr, const Matrix& v) {
  if (v.rows() != qr.q.rows()) {
    throw DimensionError("qr_solve: right hand side has " + std::to_string(v.rows()) +
                         " rows, expected " + std::to_string(qr.q.rows()));
  }
  const Matrix rhs = qr.q.transpose() * v;
  return back_substitute(qr.r, rhs);
}

ThinSVD thin_svd(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) throw DimensionError("thin_svd: empty matrix");
  if (!a.allFinite()) throw DomainError("thin_svd: non-finite entry");

  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ThinSVD out;
  out.left = svd.matrixU();
  out.singular_values = svd.singularValues();
  out.right = svd.matrixV();
  return out;
}

namespace {

void validate(const TrustRegionProblem& p) {
  if (p.eigenvalues.size() != p.rhs_coords.size()) {
    throw DimensionError("trust_region_solve: " + std::to_string(p.eigenvalues.size()) +
                         " eigenvalues but " + std::to_string(p.rhs_coords.size()) +
                         " right hand side coordinates");
  }
  if (!(p.radius >= 0.0) || std::isnan(p.radius)) {
    throw DomainError("trust_region_solve: radius must be nonnegative");
  }
  for (Index i = 0; i < p.eigenvalues.size(); ++i) {
    const double lam = p.eigenvalues[i];
    if (!(lam >= 0.0) || !std::isfinite(lam)) {
      throw DomainError("trust_region_solve: eigenvalue " + std::to_string(i) +
                        " is negative or non-finite; the quadratic must be PSD");
    }
    if (i > 0 && lam > p.eigenvalues[i - 1]) {
      throw DomainError("trust_region_solve: eigenvalues must be sorted nonincreasing");
    }
  }
  if (!p.rhs_coords.allFinite()) throw DomainError("trust_region_solve: non-finite rhs");
}

}  // namespace

double trust_region_objective(const TrustRegionProblem& p, const Vector& x) {
  return (p.eigenvalues.array() * x.array().square()).sum() - p.rhs_coords.dot(x);
}

TrustRegionSolution trust_region_solve(const TrustRegionProblem& p) {
  validate(p);
  const Index m = p.eigenvalues.size();
  const Vector& lam = p.eigenvalues;
  const Vector& beta = p.rhs_coords;
  const double r = p.radius;

  TrustRegionSolution out;
  out.coords = Vector::Zero(m);
  if (r == 0.0 || m == 0) return out;

  // Unconstrained minimum-norm stationary point.
  bool unbounded = false;
  double sq_norm0 = 0.0;
  for (Index i = 0; i < m; ++i) {
    if (beta[i] == 0.0) continue;
    if (lam[i] == 0.0) {
      unbounded = true;
      break;
    }
    const double xi = beta[i] / (2.0 * lam[i]);
    out.coords[i] = xi;
    sq_norm0 += xi * xi;
  }
  if (!unbounded && std::sqrt(sq_norm0) <= r) return out;

  // Boundary solution: ||x(mu)|| = r with x(mu)_i = beta_i / (2 (lambda_i + mu)).
  auto norm_at = [&](double mu, double* slope) {
    double s2 = 0.0;
    double ds2 = 0.0;
    for (Index i = 0; i < m; ++i) {
      if (beta[i] == 0.0) continue;
      const double denom = lam[i] + mu;
      const double b2 = beta[i] * beta[i];
      s2 += b2 / (4.0 * denom * denom);
      ds2 -= b2 / (2.0 * denom * denom * denom);
    }
    if (slope) *slope = ds2;
    return std::sqrt(s2);
  };

  double lo = 0.0;
  for (Index i = 0; i < m; ++i) lo = std::max(lo, std::abs(beta[i]) / (2.0 * r) - lam[i]);
  double hi = beta.norm() / (2.0 * r);
  hi = std::max(hi, lo);

  // phi(mu) = 1/r - 1/||x(mu)|| is convex and decreasing, so Newton started
  // from the left end of the bracket approaches the root monotonically. The
  // bisection fallback only triggers on round-off.
  double mu = lo;
  constexpr int kMaxIterations = 200;
  constexpr double kTolerance = 1e-13;
  int it = 0;
  for (; it < kMaxIterations; ++it) {
    double ds2 = 0.0;
    const double s = norm_at(mu, &ds2);
    if (std::abs(s - r) <= kTolerance * r) break;
    if (s > r) {
      lo = mu;
    } else {
      hi = mu;
    }
    const double phi = 1.0 / r - 1.0 / s;
    const double dphi = ds2 / (2.0 * s * s * s);
    double next = mu - phi / dphi;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (next == mu || hi - lo <= std::numeric_limits<double>::epsilon() * hi) {
      mu = next;
      break;
    }
    mu = next;
  }

  for (Index i = 0; i < m; ++i) {
    out.coords[i] = beta[i] == 0.0 ? 0.0 : beta[i] / (2.0 * (lam[i] + mu));
  }
  const double final_norm = out.coords.norm();
  if (final_norm > r) out.coords *= r / final_norm;
  out.multiplier = mu;
  out.iterations = it;
  return out;
}

}  // namespace primo
