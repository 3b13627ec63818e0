#include "primo/data.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "primo/errors.hpp"

namespace primo {

DesignMatrix::DesignMatrix(Matrix x, double x_bound) : x_(std::move(x)), x_bound_(x_bound) {
  if (x_.rows() < 1 || x_.cols() < 1) throw DimensionError("design matrix must be non-empty");
  if (!(x_bound >= 0.0) || !std::isfinite(x_bound)) {
    throw DomainError("design matrix: x_bound must be finite and nonnegative");
  }
  if (!x_.allFinite()) throw DomainError("design matrix: non-finite entry");
  for (Index i = 0; i < x_.rows(); ++i) {
    const double norm = x_.row(i).norm();
    if (norm > x_bound_) {
      if (x_bound_ == 0.0) {
        x_.row(i).setZero();
      } else {
        x_.row(i) *= x_bound_ / norm;
      }
      ++clipped_rows_;
    }
  }
}

DesignMatrix DesignMatrix::select_rows(std::span<const Index> rows) const {
  Matrix sub(static_cast<Index>(rows.size()), x_.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= x_.rows()) throw DimensionError("select_rows: index out of range");
    sub.row(static_cast<Index>(i)) = x_.row(rows[i]);
  }
  return DesignMatrix(std::move(sub), x_bound_);
}

namespace {

std::vector<std::uint64_t> default_ids(Index l) {
  std::vector<std::uint64_t> ids(static_cast<std::size_t>(l));
  std::iota(ids.begin(), ids.end(), std::uint64_t{0});
  return ids;
}

}  // namespace

OutcomeMatrix::OutcomeMatrix(Matrix y, double y_bound)
    : OutcomeMatrix(std::move(y), y_bound, {}) {}

OutcomeMatrix::OutcomeMatrix(Matrix y, double y_bound, std::vector<std::uint64_t> column_ids)
    : y_(std::move(y)), y_bound_(y_bound), column_ids_(std::move(column_ids)) {
  if (y_.rows() < 1 || y_.cols() < 1) throw DimensionError("outcome matrix must be non-empty");
  if (!(y_bound >= 0.0) || !std::isfinite(y_bound)) {
    throw DomainError("outcome matrix: y_bound must be finite and nonnegative");
  }
  if (!y_.allFinite()) throw DomainError("outcome matrix: non-finite entry");
  const double largest = y_.cwiseAbs().maxCoeff();
  if (largest > y_bound_) {
    throw DomainError("outcome matrix: entry of magnitude " + std::to_string(largest) +
                      " exceeds y_bound " + std::to_string(y_bound_));
  }
  if (column_ids_.empty()) column_ids_ = default_ids(y_.cols());
  if (static_cast<Index>(column_ids_.size()) != y_.cols()) {
    throw DimensionError("outcome matrix: need one column id per column");
  }
  row_norms_ = y_.rowwise().norm();
  max_row_norm_ = row_norms_.maxCoeff();
}

OutcomeMatrix OutcomeMatrix::with_empirical_bound(Matrix y) {
  if (y.size() == 0) throw DimensionError("outcome matrix must be non-empty");
  const double bound = y.cwiseAbs().maxCoeff();
  return OutcomeMatrix(std::move(y), bound);
}

OutcomeMatrix OutcomeMatrix::permute_columns(std::span<const Index> perm) const {
  if (static_cast<Index>(perm.size()) != l()) throw DimensionError("permute_columns: wrong length");
  Matrix y(n(), l());
  std::vector<std::uint64_t> ids(perm.size());
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t j = 0; j < perm.size(); ++j) {
    const Index src = perm[j];
    if (src < 0 || src >= l() || seen[static_cast<std::size_t>(src)]) {
      throw DomainError("permute_columns: not a permutation");
    }
    seen[static_cast<std::size_t>(src)] = true;
    y.col(static_cast<Index>(j)) = y_.col(src);
    ids[j] = column_ids_[static_cast<std::size_t>(src)];
  }
  return OutcomeMatrix(std::move(y), y_bound_, std::move(ids));
}

}  // namespace primo
