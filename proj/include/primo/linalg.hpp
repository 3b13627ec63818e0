#pragma once

#include <Eigen/Dense>

namespace primo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thin singular value decomposition a = left * diag(singular_values) * right^T.
/// For an a x b input, k = min(a, b); left is a x k, right is b x k and the
/// singular values are sorted nonincreasing.
struct ThinSVD {
  Matrix left;
  Vector singular_values;
  Matrix right;
};

/// Full QR factors of a square matrix: q orthogonal, r upper triangular.
struct QRFactors {
  Matrix q;
  Matrix r;
};

/// Minimize sum_i eigenvalues_i x_i^2 - rhs_coords_i x_i over ||x||_2 <= radius.
///
/// The quadratic is given in the eigenbasis of a positive semidefinite matrix,
/// so eigenvalues must be nonnegative and sorted nonincreasing.
struct TrustRegionProblem {
  Vector eigenvalues;
  Vector rhs_coords;
  double radius = 0.0;
};

struct TrustRegionSolution {
  Vector coords;
  /// Lagrange multiplier of the norm constraint; zero for interior solutions.
  double multiplier = 0.0;
  int iterations = 0;
};

/// Householder QR of a square matrix. Singular inputs are fine (r gets zero
/// diagonal entries); non-square inputs throw DimensionError.
QRFactors qr_decompose(const Matrix& a);

/// Pivots with |r_ii| <= kSingularityThreshold * max_i |r_ii| are rejected.
inline constexpr double kSingularityThreshold = 1e-12;

/// Solve r * w = v for upper triangular r.
/// Throws SingularSystemError when a pivot is below the singularity threshold.
Vector back_substitute(const Matrix& r, const Vector& v);

/// Column-wise back substitution for a block of right hand sides.
Matrix back_substitute(const Matrix& r, const Matrix& v);

/// Solve a * w = v using precomputed QR factors of a (w = r^{-1} q^T v).
Matrix qr_solve(const QRFactors& qr, const Matrix& v);

/// Thin SVD (bidiagonal divide and conquer).
ThinSVD thin_svd(const Matrix& a);

/// Solve the l2-ball constrained quadratic by the secular equation.
///
/// Interior case: if the unconstrained minimizer beta_i / (2 lambda_i) lies in
/// the ball it is returned with multiplier 0. Otherwise the multiplier mu > 0
/// solving sum_i beta_i^2 / (4 (lambda_i + mu)^2) = radius^2 is found by
/// safeguarded Newton on 1/radius - 1/||x(mu)|| inside the bracket
/// [max(0, max_i |beta_i|/(2 radius) - lambda_i), ||beta|| / (2 radius)].
/// Directions with lambda_i = beta_i = 0 get a zero coordinate (minimum norm).
/// Throws DomainError for negative eigenvalues and DimensionError on a length
/// mismatch.
TrustRegionSolution trust_region_solve(const TrustRegionProblem& p);

/// sum_i lambda_i x_i^2 - beta_i x_i
double trust_region_objective(const TrustRegionProblem& p, const Vector& x);

bool all_finite(const Matrix& a);

}  // namespace primo
