#pragma once

#include <string>
#include <vector>

#include "gridres/matrix.hpp"

namespace gridres {

/// Thin SVD A = U diag(sigma) V^T with sigma sorted descending and a fixed
/// sign convention (largest-magnitude entry of each U column non-negative).
struct SvdResult {
  Matrix u;                   // m x k
  std::vector<double> sigma;  // k = min(m, n), descending
  Matrix v;                   // n x k

  std::size_t rank_bound() const { return sigma.size(); }
  Matrix reconstruct() const;
};

/// One-sided Jacobi SVD. Accurate for the small batch-by-action matrices this
/// project works with; throws ConvergenceFailure if the sweep budget runs out.
SvdResult svd(const Matrix& a, int max_sweeps = 60);

enum class RegKind {
  Nuclear,
  LogNuclear,
  ElasticNet,
  SchattenP,
  TruncatedNuclear,
  PartialSumNuclear,
  WeightedNuclear,
};

RegKind reg_kind_from_name(const std::string& name);
std::string to_string(RegKind kind);

/// Spectral regularizer R(Q) evaluated on singular values.
struct RegularizerSpec {
  RegKind kind = RegKind::Nuclear;
  double gamma_en = 1.0;          // elastic-net quadratic coefficient
  double p = 1.0;                 // Schatten exponent, > 0
  int r = 0;                      // values skipped by truncated/partial-sum
  std::vector<double> weights;    // weighted nuclear, one per singular value
  // The printed weighted-nuclear formula starts at i = r+1; the default sums
  // the full range, the published norm's usual form.
  bool weighted_full_range = true;

  void validate(std::size_t k) const;
};

double reg_value(const RegularizerSpec& spec, const SvdResult& svd);

/// Gradient of reg_value with respect to the matrix entries:
/// U diag(g(sigma)) V^T with g the spectral derivative. With repeated
/// singular values this is still a valid subgradient member; `degenerate`
/// reports that the separation precondition failed.
struct RegGradient {
  Matrix grad;
  bool degenerate = false;
};

RegGradient reg_grad(const RegularizerSpec& spec, const SvdResult& svd);

}  // namespace gridres
