#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace adiabatic {

/// Compressed-row square matrix specialised for the one product the engine
/// needs: a block of row vectors times the matrix. The sparsity pattern is
/// fixed at construction; values may be overwritten in place.
class RowOperator {
 public:
  RowOperator() = default;

  /// Keeps entries (i, j) with pattern(i, j) == true. `values` supplies the
  /// initial numbers for those entries.
  RowOperator(const Eigen::MatrixXd& values,
              const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& pattern);

  /// Pattern = nonzeros of `dense`, plus the diagonal when `keep_diagonal`.
  static RowOperator from_dense(const Eigen::MatrixXd& dense,
                                bool keep_diagonal = false);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nonzeros() const noexcept { return cols_.size(); }

  const std::vector<std::size_t>& row_starts() const noexcept { return row_starts_; }
  const std::vector<std::size_t>& cols() const noexcept { return cols_; }
  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// out = rows * A. Each row of `rows` is an independent vector.
  void apply(const Eigen::MatrixXd& rows, Eigen::MatrixXd& out) const;

  /// out = rows + scale * (rows * A)
  void apply_axpy(const Eigen::MatrixXd& rows, double scale,
                  Eigen::MatrixXd& out) const;

  Eigen::MatrixXd to_dense() const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_starts_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

}  // namespace adiabatic
