#include "gridres/matrix.hpp"

#include <cblas.h>
#include <cmath>
#include <string>

extern "C" void openblas_set_num_threads(int);

namespace gridres {
namespace {

// Pin BLAS to one thread once, before any product runs: keeps results
// deterministic and leaves parallelism to the sweep workers.
struct BlasInit {
  BlasInit() { openblas_set_num_threads(1); }
};

void require_inner(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw ShapeMismatch(std::string(what) + ": inner dimensions " +
                        std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix gemm(const Matrix& a, const Matrix& b) {
  static BlasInit init;
  require_inner(a.cols(), b.rows(), "gemm");
  Matrix c(a.rows(), b.cols());
  if (c.size() == 0 || a.cols() == 0) return c;
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, (int)a.rows(),
              (int)b.cols(), (int)a.cols(), 1.0, a.data(), (int)a.cols(),
              b.data(), (int)b.cols(), 0.0, c.data(), (int)c.cols());
  return c;
}

Matrix gemm_tn(const Matrix& a, const Matrix& b) {
  static BlasInit init;
  require_inner(a.rows(), b.rows(), "gemm_tn");
  Matrix c(a.cols(), b.cols());
  if (c.size() == 0 || a.rows() == 0) return c;
  cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, (int)a.cols(),
              (int)b.cols(), (int)a.rows(), 1.0, a.data(), (int)a.cols(),
              b.data(), (int)b.cols(), 0.0, c.data(), (int)c.cols());
  return c;
}

Matrix gemm_nt(const Matrix& a, const Matrix& b) {
  static BlasInit init;
  require_inner(a.cols(), b.cols(), "gemm_nt");
  Matrix c(a.rows(), b.rows());
  if (c.size() == 0 || a.cols() == 0) return c;
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, (int)a.rows(),
              (int)b.rows(), (int)a.cols(), 1.0, a.data(), (int)a.cols(),
              b.data(), (int)b.cols(), 0.0, c.data(), (int)c.cols());
  return c;
}

std::vector<double> solve_dense(Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n)
    throw ShapeMismatch("solve_dense: system must be square");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::fabs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::fabs(a(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best < 1e-12)
      throw SingularSystem("solve_dense: pivot " + std::to_string(col) +
                           " below tolerance");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
      std::swap(b[col], b[pivot]);
    }
    const double inv = 1.0 / a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) * inv;
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a(i, j) * x[j];
    x[i] = acc / a(i, i);
  }
  return x;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : m.storage()) s += v * v;
  return std::sqrt(s);
}

}  // namespace gridres
