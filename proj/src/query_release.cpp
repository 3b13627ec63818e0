#include "primo/query_release.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include "primo/errors.hpp"
#include "primo/rng.hpp"

namespace primo {
namespace {

using ConstMap = Eigen::Map<const Matrix>;

void require_length(const char* op, Index got, Index want) {
  if (got != want) {
    throw DimensionError(std::string(op) + ": vector has length " + std::to_string(got) +
                         ", expected " + std::to_string(want));
  }
}

Vector flatten(Matrix m) {
  const Index size = m.size();
  return Eigen::Map<Vector>(m.data(), size);
}

}  // namespace

double inner_product_query(const DesignMatrix& x, Index k, const Vector& y_col) {
  if (k < 0 || k >= x.d()) {
    throw DimensionError("inner_product_query: feature index " + std::to_string(k) +
                         " out of range [0, " + std::to_string(x.d()) + ")");
  }
  require_length("inner_product_query", y_col.size(), x.n());
  return x.values().col(k).dot(y_col) / static_cast<double>(x.n());
}

Vector true_answers(const DesignMatrix& x, const OutcomeMatrix& y) {
  if (x.n() != y.n()) {
    throw DimensionError("true_answers: X has " + std::to_string(x.n()) + " rows but Y has " +
                         std::to_string(y.n()));
  }
  const double inv_n = 1.0 / static_cast<double>(x.n());
  Matrix answers = inv_n * (y.values().transpose() * x.values());  // l x d
  return flatten(std::move(answers));
}

struct KroneckerSpectrum::Factors {
  ThinSVD svd;
  // Wide case only: Householder QR of Y and the left factor of R's SVD.
  Eigen::HouseholderQR<Matrix> qr;
  Matrix r_left;
  bool right_deferred = false;
  std::once_flag right_once;
};

KroneckerSpectrum::KroneckerSpectrum(const OutcomeMatrix& y, Index d)
    : d_(d), y_(y.values()), factors_(std::make_shared<Factors>()) {
  if (d < 1) throw DomainError("kron_spectrum: d must be at least 1");
  const Index n = y_.rows();
  const Index l = y_.cols();
  Factors& f = *factors_;
  if (l <= n) {
    // Y = Q R and R = U S W^T give Y^T = W S (Q U)^T, so only l x l work is
    // needed beyond the QR.
    f.qr.compute(y_);
    const Matrix r = f.qr.matrixQR().topRows(l).triangularView<Eigen::Upper>();
    ThinSVD small = thin_svd(r);
    f.svd.left = std::move(small.right);
    f.svd.singular_values = std::move(small.singular_values);
    f.r_left = std::move(small.left);
    f.right_deferred = true;
  } else {
    f.svd = thin_svd(y_.transpose());
  }
  const double nn = static_cast<double>(n);
  eigenvalues_ = f.svd.singular_values.array().square() / (nn * nn);

  const Vector& sv = f.svd.singular_values;
  const double top = sv.size() > 0 ? sv[0] : 0.0;
  const double tol = static_cast<double>(std::max(n, l)) * std::numeric_limits<double>::epsilon() * top;
  rank_ = 0;
  if (top > 0.0) {
    while (rank_ < sv.size() && sv[rank_] > tol) ++rank_;
  }
}

const Matrix& KroneckerSpectrum::left() const { return factors_->svd.left; }

const Vector& KroneckerSpectrum::singular_values() const { return factors_->svd.singular_values; }

const ThinSVD& KroneckerSpectrum::svd() const {
  Factors& f = *factors_;
  std::call_once(f.right_once, [&] {
    if (!f.right_deferred) return;
    Matrix padded = Matrix::Zero(y_.rows(), y_.cols());
    padded.topRows(y_.cols()) = f.r_left;
    f.svd.right = f.qr.householderQ() * padded;
  });
  return f.svd;
}

KroneckerSpectrum kron_spectrum(const OutcomeMatrix& y, Index d) { return KroneckerSpectrum(y, d); }

Vector apply_C(const KroneckerSpectrum& spec, const Vector& v) {
  require_length("apply_C", v.size(), spec.d() * spec.n());
  const ConstMap blocks(v.data(), spec.n(), spec.d());
  const double inv_n = 1.0 / static_cast<double>(spec.n());
  return flatten(inv_n * (spec.outcomes().transpose() * blocks));
}

Vector apply_Ct(const KroneckerSpectrum& spec, const Vector& g) {
  require_length("apply_Ct", g.size(), spec.d() * spec.l());
  const ConstMap blocks(g.data(), spec.l(), spec.d());
  const double inv_n = 1.0 / static_cast<double>(spec.n());
  return flatten(inv_n * (spec.outcomes() * blocks));
}

namespace {

// (2/n) diag(sigma_r) L_r^T mat(g): rank x d.
Matrix coords_matrix(const KroneckerSpectrum& spec, const Vector& g_tilde) {
  const ConstMap blocks(g_tilde.data(), spec.l(), spec.d());
  const Index r = spec.rank();
  const double scale = 2.0 / static_cast<double>(spec.n());
  Matrix coords = spec.left().leftCols(r).transpose() * blocks;
  coords = (scale * spec.singular_values().head(r)).asDiagonal() * coords;
  return coords;
}

}  // namespace

Vector eigenbasis_coords(const KroneckerSpectrum& spec, const Vector& g_tilde) {
  require_length("eigenbasis_coords", g_tilde.size(), spec.d() * spec.l());
  return flatten(coords_matrix(spec, g_tilde));
}

ProjectionResult project_onto_feasible(const KroneckerSpectrum& spec, const Vector& g_tilde,
                                       double x_bound) {
  require_length("project_onto_feasible", g_tilde.size(), spec.d() * spec.l());
  if (!(x_bound >= 0.0) || !std::isfinite(x_bound)) {
    throw DomainError("project_onto_feasible: x_bound must be finite and nonnegative");
  }
  const Index d = spec.d();
  const Index r = spec.rank();

  ProjectionResult out;
  out.radius = std::sqrt(static_cast<double>(spec.n())) * x_bound;
  out.answers = Vector::Zero(d * spec.l());
  out.coords = Vector::Zero(d * r);
  if (r == 0 || out.radius == 0.0) return out;

  const Matrix coords = coords_matrix(spec, g_tilde);  // r x d

  // The trust-region solver wants eigenvalues sorted, so order the problem
  // eigenvalue-major: index j*d + k holds direction (block k, eigenvector j).
  TrustRegionProblem problem;
  problem.radius = out.radius;
  problem.eigenvalues.resize(r * d);
  for (Index j = 0; j < r; ++j) problem.eigenvalues.segment(j * d, d).setConstant(spec.eigenvalues()[j]);
  const Matrix coords_t = coords.transpose();  // d x r, column-major is eigenvalue-major
  problem.rhs_coords = Eigen::Map<const Vector>(coords_t.data(), r * d);

  const TrustRegionSolution sol = trust_region_solve(problem);
  const Matrix z = Eigen::Map<const Matrix>(sol.coords.data(), d, r).transpose();  // r x d

  out.coords = flatten(z);
  if (sol.multiplier == 0.0 && r == spec.l()) {
    // C is onto and the ball constraint is inactive, so g_tilde is in K.
    out.answers = g_tilde;
  } else {
    const double inv_n = 1.0 / static_cast<double>(spec.n());
    const Matrix lifted = (inv_n * spec.singular_values().head(r)).asDiagonal() * z;
    out.answers = flatten(spec.left().leftCols(r) * lifted);  // l x d
  }
  out.multiplier = sol.multiplier;
  out.preimage_norm = sol.coords.norm();
  return out;
}

Vector feasible_preimage(const KroneckerSpectrum& spec, const ProjectionResult& result) {
  const Index r = spec.rank();
  require_length("feasible_preimage", result.coords.size(), spec.d() * r);
  if (r == 0) return Vector::Zero(spec.d() * spec.n());
  const ConstMap z(result.coords.data(), r, spec.d());
  return flatten(spec.v().leftCols(r) * z);  // n x d
}

double projection_noise_scale(const DesignMatrix& x, const OutcomeMatrix& y,
                              const PrivacyBudget& b) {
  return calibration_constant(b) * 2.0 * y.max_row_norm() * x.x_bound() /
         static_cast<double>(x.n());
}

ProjectionRelease projection_mechanism(const DesignMatrix& x, const OutcomeMatrix& y,
                                       const PrivacyBudget& b, std::uint64_t seed) {
  return projection_mechanism(x, y, kron_spectrum(y, x.d()), b, seed);
}

ProjectionRelease projection_mechanism(const DesignMatrix& x, const OutcomeMatrix& y,
                                       const KroneckerSpectrum& spec, const PrivacyBudget& b,
                                       std::uint64_t seed) {
  if (spec.d() != x.d() || spec.n() != y.n() || spec.l() != y.l() || x.n() != y.n()) {
    throw DimensionError("projection_mechanism: spectrum, X and Y dimensions disagree");
  }
  const Index d = x.d();
  const Index l = y.l();

  ProjectionRelease out;
  out.noise_scale = projection_noise_scale(x, y, b);
  out.noisy_answers = true_answers(x, y);
  if (out.noise_scale > 0.0) {
    for (Index j = 0; j < l; ++j) {
      Rng rng = Rng::stream(seed, StreamPurpose::projection,
                            y.column_ids()[static_cast<std::size_t>(j)]);
      for (Index k = 0; k < d; ++k) out.noisy_answers[k * l + j] += out.noise_scale * rng.normal();
    }
  }

  ProjectionResult projected = project_onto_feasible(spec, out.noisy_answers, x.x_bound());
  out.answers = std::move(projected.answers);
  out.multiplier = projected.multiplier;
  out.preimage_norm = projected.preimage_norm;
  out.spectrum_rank = spec.rank();
  return out;
}

}  // namespace primo
