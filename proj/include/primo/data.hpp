#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "primo/linalg.hpp"

namespace primo {

/// Private n x d design matrix with a declared row-norm bound.
///
/// Rows whose l2 norm exceeds x_bound are scaled down onto the bound at
/// construction, so the sensitivity formulas hold unconditionally.
class DesignMatrix {
 public:
  DesignMatrix(Matrix x, double x_bound);

  const Matrix& values() const { return x_; }
  double x_bound() const { return x_bound_; }
  Index n() const { return x_.rows(); }
  Index d() const { return x_.cols(); }
  Index clipped_rows() const { return clipped_rows_; }

  /// Rows listed in `rows` (in that order), same bound.
  DesignMatrix select_rows(std::span<const Index> rows) const;

 private:
  Matrix x_;
  double x_bound_;
  Index clipped_rows_ = 0;
};

/// Public n x l outcome matrix with entry bound |y_ij| <= y_bound.
///
/// Each column carries an id that keys its noise streams, so permuting the
/// columns (ids included) permutes every per-column random draw with them.
class OutcomeMatrix {
 public:
  OutcomeMatrix(Matrix y, double y_bound);
  OutcomeMatrix(Matrix y, double y_bound, std::vector<std::uint64_t> column_ids);

  /// Bound set to the empirical max |y_ij| (public or synthetic data only).
  static OutcomeMatrix with_empirical_bound(Matrix y);

  const Matrix& values() const { return y_; }
  double y_bound() const { return y_bound_; }
  Index n() const { return y_.rows(); }
  Index l() const { return y_.cols(); }

  /// ||y^i||_2 for each individual i (row norms).
  const Vector& row_norms() const { return row_norms_; }
  double max_row_norm() const { return max_row_norm_; }
  const std::vector<std::uint64_t>& column_ids() const { return column_ids_; }

  /// Column j of the result is column perm[j] of this matrix.
  OutcomeMatrix permute_columns(std::span<const Index> perm) const;

 private:
  Matrix y_;
  double y_bound_;
  Vector row_norms_;
  double max_row_norm_ = 0.0;
  std::vector<std::uint64_t> column_ids_;
};

}  // namespace primo
