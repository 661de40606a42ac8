#pragma once

#include <cstddef>
#include <vector>

#include "gridres/errors.hpp"

namespace gridres {

/// Dense row-major matrix of doubles. Products are delegated to a BLAS
/// dgemm pinned to a single thread, so results are deterministic; everything
/// else (solvers, decompositions, gradients) in this project is hand-written
/// on top of this storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  void fill(double v) { data_.assign(data_.size(), v); }

  Matrix transposed() const;

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// C = A * B
Matrix gemm(const Matrix& a, const Matrix& b);
/// C = A^T * B
Matrix gemm_tn(const Matrix& a, const Matrix& b);
/// C = A * B^T
Matrix gemm_nt(const Matrix& a, const Matrix& b);

/// Solves A x = b by Gaussian elimination with partial pivoting; A is
/// overwritten. Throws SingularSystem when no usable pivot remains.
std::vector<double> solve_dense(Matrix a, std::vector<double> b);

double frobenius_norm(const Matrix& m);

}  // namespace gridres
