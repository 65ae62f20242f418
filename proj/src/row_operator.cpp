#include "adiabatic/row_operator.hpp"

#include "adiabatic/errors.hpp"

namespace adiabatic {

RowOperator::RowOperator(
    const Eigen::MatrixXd& values,
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& pattern)
    : dim_(static_cast<std::size_t>(values.rows())) {
  if (values.rows() != values.cols() || pattern.rows() != values.rows() ||
      pattern.cols() != values.cols()) {
    throw DimensionMismatch("RowOperator: values and pattern must be square and equal-sized");
  }
  row_starts_.reserve(dim_ + 1);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (pattern(i, j)) {
        cols_.push_back(static_cast<std::size_t>(j));
        values_.push_back(values(i, j));
      }
    }
    row_starts_.push_back(cols_.size());
  }
}

RowOperator RowOperator::from_dense(const Eigen::MatrixXd& dense,
                                    bool keep_diagonal) {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> pattern =
      (dense.array() != 0.0).matrix();
  if (keep_diagonal) {
    for (Eigen::Index i = 0; i < dense.rows(); ++i) pattern(i, i) = true;
  }
  return RowOperator(dense, pattern);
}

void RowOperator::apply(const Eigen::MatrixXd& rows, Eigen::MatrixXd& out) const {
  if (static_cast<std::size_t>(rows.cols()) != dim_) {
    throw DimensionMismatch("RowOperator::apply: row length does not match operator");
  }
  out.setZero(rows.rows(), rows.cols());
  for (std::size_t i = 0; i < dim_; ++i) {
    const auto src = rows.col(static_cast<Eigen::Index>(i));
    for (std::size_t k = row_starts_[i]; k < row_starts_[i + 1]; ++k) {
      out.col(static_cast<Eigen::Index>(cols_[k])) += values_[k] * src;
    }
  }
}

void RowOperator::apply_axpy(const Eigen::MatrixXd& rows, double scale,
                             Eigen::MatrixXd& out) const {
  if (static_cast<std::size_t>(rows.cols()) != dim_) {
    throw DimensionMismatch("RowOperator::apply_axpy: row length does not match operator");
  }
  out = rows;
  for (std::size_t i = 0; i < dim_; ++i) {
    const auto src = rows.col(static_cast<Eigen::Index>(i));
    for (std::size_t k = row_starts_[i]; k < row_starts_[i + 1]; ++k) {
      out.col(static_cast<Eigen::Index>(cols_[k])) += (scale * values_[k]) * src;
    }
  }
}

Eigen::MatrixXd RowOperator::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t k = row_starts_[i]; k < row_starts_[i + 1]; ++k) {
      dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols_[k])) = values_[k];
    }
  }
  return dense;
}

}  // namespace adiabatic
