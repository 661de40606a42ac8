#include "gridres/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gridres {

Matrix SvdResult::reconstruct() const {
  Matrix us = u;  // scale columns by sigma, then multiply by V^T
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t j = 0; j < us.cols(); ++j) us(i, j) *= sigma[j];
  return gemm_nt(us, v);
}

namespace {

// One-sided Jacobi on a tall matrix (rows >= cols): rotates column pairs of W
// until all pairs are orthogonal, accumulating the rotations into V.
// Afterwards the column norms are the singular values and the normalized
// columns form U.
SvdResult jacobi_tall(Matrix w, int max_sweeps) {
  const std::size_t m = w.rows();
  const std::size_t n = w.cols();
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  const double tol = 1e-15;
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double wp = w(i, p), wq = w(i, q);
          app += wp * wp;
          aqq += wq * wq;
          apq += wp * wq;
        }
        if (std::fabs(apq) <= tol * std::sqrt(app * aqq)) continue;
        converged = false;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, zeta) /
                         (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
  }
  if (!converged)
    throw ConvergenceFailure("svd: one-sided Jacobi exceeded sweep budget");

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) norm += w(i, j) * w(i, j);
    sigma[j] = std::sqrt(norm);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

  SvdResult res;
  res.sigma.resize(n);
  res.u = Matrix(m, n);
  res.v = Matrix(n, n);
  const double tiny = sigma.empty() ? 0.0 : sigma[order[0]] * 1e-14;
  for (std::size_t jj = 0; jj < n; ++jj) {
    const std::size_t src = order[jj];
    res.sigma[jj] = sigma[src];
    for (std::size_t i = 0; i < n; ++i) res.v(i, jj) = v(i, src);
    if (sigma[src] > tiny && sigma[src] > 0.0) {
      const double inv = 1.0 / sigma[src];
      for (std::size_t i = 0; i < m; ++i) res.u(i, jj) = w(i, src) * inv;
    }
    // Columns for (near-)zero singular values are completed below.
  }

  // Orthonormal completion for null-space columns of U: pick the basis
  // vector with the largest residual after projecting out the known columns.
  for (std::size_t jj = 0; jj < n; ++jj) {
    if (res.sigma[jj] > tiny && res.sigma[jj] > 0.0) continue;
    std::vector<double> best;
    double best_norm = -1.0;
    for (std::size_t cand = 0; cand < m; ++cand) {
      std::vector<double> col(m, 0.0);
      col[cand] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t other = 0; other < n; ++other) {
          if (other == jj) continue;
          if (res.sigma[other] <= tiny && other > jj) continue;  // not built yet
          double dot = 0.0;
          for (std::size_t i = 0; i < m; ++i) dot += col[i] * res.u(i, other);
          for (std::size_t i = 0; i < m; ++i) col[i] -= dot * res.u(i, other);
        }
      }
      double norm = 0.0;
      for (double x : col) norm += x * x;
      norm = std::sqrt(norm);
      if (norm > best_norm + 1e-12) {
        best_norm = norm;
        best = std::move(col);
      }
    }
    for (std::size_t i = 0; i < m; ++i) res.u(i, jj) = best[i] / best_norm;
  }

  // Sign convention: largest-magnitude entry of each U column non-negative.
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t arg = 0;
    double mag = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = std::fabs(res.u(i, j));
      if (a > mag + 1e-15) {
        mag = a;
        arg = i;
      }
    }
    if (res.u(arg, j) < 0.0) {
      for (std::size_t i = 0; i < m; ++i) res.u(i, j) = -res.u(i, j);
      for (std::size_t i = 0; i < n; ++i) res.v(i, j) = -res.v(i, j);
    }
  }
  return res;
}

}  // namespace

SvdResult svd(const Matrix& a, int max_sweeps) {
  if (a.rows() == 0 || a.cols() == 0) throw ShapeMismatch("svd: empty matrix");
  for (double x : a.storage())
    if (!std::isfinite(x)) throw Error("svd: non-finite entry");
  if (a.rows() >= a.cols()) return jacobi_tall(a, max_sweeps);
  SvdResult t = jacobi_tall(a.transposed(), max_sweeps);
  SvdResult res;
  res.sigma = std::move(t.sigma);
  res.u = std::move(t.v);
  res.v = std::move(t.u);
  return res;
}

RegKind reg_kind_from_name(const std::string& name) {
  if (name == "nuclear") return RegKind::Nuclear;
  if (name == "log_nuclear") return RegKind::LogNuclear;
  if (name == "elastic_net") return RegKind::ElasticNet;
  if (name == "schatten_p") return RegKind::SchattenP;
  if (name == "truncated_nuclear") return RegKind::TruncatedNuclear;
  if (name == "partial_sum_nuclear") return RegKind::PartialSumNuclear;
  if (name == "weighted_nuclear") return RegKind::WeightedNuclear;
  throw InvalidSpec("unknown regularizer: " + name);
}

std::string to_string(RegKind kind) {
  switch (kind) {
    case RegKind::Nuclear: return "nuclear";
    case RegKind::LogNuclear: return "log_nuclear";
    case RegKind::ElasticNet: return "elastic_net";
    case RegKind::SchattenP: return "schatten_p";
    case RegKind::TruncatedNuclear: return "truncated_nuclear";
    case RegKind::PartialSumNuclear: return "partial_sum_nuclear";
    case RegKind::WeightedNuclear: return "weighted_nuclear";
  }
  return "?";
}

void RegularizerSpec::validate(std::size_t k) const {
  if (kind == RegKind::SchattenP && p <= 0.0)
    throw InvalidSpec("schatten_p: p must be > 0");
  if (kind == RegKind::TruncatedNuclear || kind == RegKind::PartialSumNuclear ||
      (kind == RegKind::WeightedNuclear && !weighted_full_range)) {
    if (r < 0 || static_cast<std::size_t>(r) >= k)
      throw InvalidSpec("regularizer: r must lie in [0, k)");
  }
  if (kind == RegKind::WeightedNuclear) {
    if (weights.size() < k)
      throw InvalidSpec("weighted_nuclear: need at least k weights");
    for (double w : weights)
      if (w < 0.0) throw InvalidSpec("weighted_nuclear: weights must be >= 0");
  }
  if (kind == RegKind::ElasticNet && gamma_en < 0.0)
    throw InvalidSpec("elastic_net: gamma must be >= 0");
}

namespace {

// Derivative of the spectral term at sigma_i (index 0-based).
double spectral_derivative(const RegularizerSpec& spec, double sigma, std::size_t i) {
  switch (spec.kind) {
    case RegKind::Nuclear:
      return 1.0;
    case RegKind::LogNuclear:
      return 1.0 / (sigma + 1.0);
    case RegKind::ElasticNet:
      return 1.0 + 2.0 * spec.gamma_en * sigma;
    case RegKind::SchattenP:
      if (spec.p == 1.0) return 1.0;
      if (spec.p < 1.0 && sigma < 1e-12) sigma = 1e-12;  // subgradient clamp
      return spec.p * std::pow(sigma, spec.p - 1.0);
    case RegKind::TruncatedNuclear:
    case RegKind::PartialSumNuclear:
      return i >= static_cast<std::size_t>(spec.r) ? 1.0 : 0.0;
    case RegKind::WeightedNuclear:
      if (!spec.weighted_full_range && i < static_cast<std::size_t>(spec.r)) return 0.0;
      return spec.weights[i];
  }
  return 0.0;
}

}  // namespace

double reg_value(const RegularizerSpec& spec, const SvdResult& svd) {
  const std::size_t k = svd.sigma.size();
  spec.validate(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double s = svd.sigma[i];
    switch (spec.kind) {
      case RegKind::Nuclear:
        total += s;
        break;
      case RegKind::LogNuclear:
        total += std::log(s + 1.0);
        break;
      case RegKind::ElasticNet:
        total += s + spec.gamma_en * s * s;
        break;
      case RegKind::SchattenP:
        total += std::pow(s, spec.p);
        break;
      case RegKind::TruncatedNuclear:
      case RegKind::PartialSumNuclear:
        if (i >= static_cast<std::size_t>(spec.r)) total += s;
        break;
      case RegKind::WeightedNuclear:
        if (spec.weighted_full_range || i >= static_cast<std::size_t>(spec.r))
          total += spec.weights[i] * s;
        break;
    }
  }
  return total;
}

RegGradient reg_grad(const RegularizerSpec& spec, const SvdResult& svd) {
  const std::size_t k = svd.sigma.size();
  spec.validate(k);

  RegGradient out;
  for (std::size_t i = 0; i + 1 < k; ++i)
    if (svd.sigma[i] - svd.sigma[i + 1] < 1e-6) out.degenerate = true;

  Matrix ug = svd.u;  // scale columns by g(sigma)
  for (std::size_t j = 0; j < k; ++j) {
    const double g = spectral_derivative(spec, svd.sigma[j], j);
    for (std::size_t i = 0; i < ug.rows(); ++i) ug(i, j) *= g;
  }
  out.grad = gemm_nt(ug, svd.v);
  return out;
}

}  // namespace gridres
