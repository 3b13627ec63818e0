#pragma once

#include <cstdint>
#include <memory>

#include "primo/data.hpp"
#include "primo/linalg.hpp"
#include "primo/privacy.hpp"

namespace primo {

// Inner product queries and the projection mechanism for releasing the
// association term (1/n) X^T Y when Y is public.
//
// Layouts used throughout:
//   * vec(X) has length d*n; block k (k = 0..d-1) is column k of the n x d
//     design matrix, i.e. the column-major storage of X.
//   * Query answer vectors have length d*l; entry (k, j) sits at index
//     k*l + j and holds (1/n) x_k . y_j. Viewed as an l x d column-major
//     matrix this is (1/n) Y^T X.
// The operator C = I_d (x) (1/n) Y^T maps the first layout onto the second and
// is never materialized.

/// q_(k, y)(X) = (1/n) sum_i X_ik y_i. Throws DimensionError on a bad index or
/// length mismatch.
double inner_product_query(const DesignMatrix& x, Index k, const Vector& y_col);

/// All d*l inner product queries: vec of (1/n) X^T Y in the k*l + j layout.
Vector true_answers(const DesignMatrix& x, const OutcomeMatrix& y);

/// Spectrum of C^T C from one thin SVD of Y^T = L diag(sigma) V^T.
///
/// C^T C = (I_d (x) V) (I_d (x) diag(sigma^2 / n^2)) (I_d (x) V^T), so its
/// nonzero eigenvalues are sigma_j^2 / n^2, each with multiplicity d.
class KroneckerSpectrum {
 public:
  KroneckerSpectrum(const OutcomeMatrix& y, Index d);

  Index d() const { return d_; }
  Index n() const { return y_.rows(); }
  Index l() const { return y_.cols(); }

  /// Left singular vectors of Y^T (l x k, k = min(n, l)).
  const Matrix& left() const;
  /// Singular values of Y^T, nonincreasing, length k.
  const Vector& singular_values() const;
  /// Thin SVD of Y^T (left: l x k, right: n x k). When l <= n the right
  /// factor is formed on first use; the projection itself never needs it.
  const ThinSVD& svd() const;
  /// Right singular vectors of Y^T (n x k).
  const Matrix& v() const { return svd().right; }
  /// sigma_j^2 / n^2, nonincreasing, length k.
  const Vector& eigenvalues() const { return eigenvalues_; }
  /// Number of singular values above the numerical rank tolerance. Only these
  /// directions enter the projection; the rest carry no signal.
  Index rank() const { return rank_; }

  const Matrix& outcomes() const { return y_; }

 private:
  Index d_;
  struct Factors;
  Matrix y_;
  std::shared_ptr<Factors> factors_;
  Vector eigenvalues_;
  Index rank_ = 0;
};

KroneckerSpectrum kron_spectrum(const OutcomeMatrix& y, Index d);

/// C v, block-wise (1/n) Y^T v_k. Cost O(n l d).
Vector apply_C(const KroneckerSpectrum& spec, const Vector& v);

/// C^T g, block-wise (1/n) Y g_k.
Vector apply_Ct(const KroneckerSpectrum& spec, const Vector& g);

/// Coordinates of b = 2 C^T g_tilde along the retained eigenvectors
/// (I_d (x) V[:, :rank]), ordered block-major (index k*rank + j). Uses
/// V^T Y = diag(sigma) L^T, so the cost is O(l rank d) and C is never formed.
Vector eigenbasis_coords(const KroneckerSpectrum& spec, const Vector& g_tilde);

struct ProjectionResult {
  /// g_hat = C x_hat, the Euclidean projection of g_tilde onto
  /// K = C (sqrt(n) x_bound B_2).
  Vector answers;
  /// x_hat in the retained eigenbasis, block-major like eigenbasis_coords.
  Vector coords;
  double multiplier = 0.0;
  /// ||x_hat||_2 (the eigenbasis is orthonormal so this equals ||coords||).
  double preimage_norm = 0.0;
  double radius = 0.0;
};

/// Project g_tilde onto K by solving min ||C x - g_tilde||^2 over
/// ||x|| <= sqrt(n) x_bound in the eigenbasis of C^T C.
ProjectionResult project_onto_feasible(const KroneckerSpectrum& spec, const Vector& g_tilde,
                                       double x_bound);

/// Explicit preimage x_hat = (I_d (x) V) coords, length d*n. Only needed for
/// diagnostics; the mechanism itself never forms it.
Vector feasible_preimage(const KroneckerSpectrum& spec, const ProjectionResult& result);

struct ProjectionRelease {
  Vector answers;        // g_hat
  Vector noisy_answers;  // g_tilde = g + r w
  double noise_scale = 0.0;  // r
  double multiplier = 0.0;
  double preimage_norm = 0.0;
  Index spectrum_rank = 0;
};

/// Noise scale r = c(b) * 2 * max_i ||y^i|| * x_bound / n of the projection
/// mechanism (replace-one adjacency, public Y).
double projection_noise_scale(const DesignMatrix& x, const OutcomeMatrix& y,
                              const PrivacyBudget& b);

/// Inner product projection mechanism. Gaussian noise for query column j comes
/// from the stream (seed, projection, column id j).
ProjectionRelease projection_mechanism(const DesignMatrix& x, const OutcomeMatrix& y,
                                       const PrivacyBudget& b, std::uint64_t seed);

/// Same, reusing a precomputed spectrum of y.
ProjectionRelease projection_mechanism(const DesignMatrix& x, const OutcomeMatrix& y,
                                       const KroneckerSpectrum& spec, const PrivacyBudget& b,
                                       std::uint64_t seed);

}  // namespace primo
