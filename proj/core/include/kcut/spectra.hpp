#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "kcut/graph.hpp"
#include "kcut/operand.hpp"

namespace kcut {

/// Rank-r spectral factorization Q_r = vectors * diag(values) * vectors^H.
/// `values` are nonincreasing; `vectors` has orthonormal columns, each
/// rotated so its largest-magnitude entry is real nonnegative.
/// `residual_estimate` approximates the first value left out (lambda_{r+1}
/// for Hermitian input, sigma_{r+1} otherwise).
struct SpectralFactor {
  int n = 0;
  int r = 0;
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
  double residual_estimate = 0.0;

  /// V = vectors * diag(sqrt(values)), the factor with Q_r = V V^H.
  /// Values inside the near-PSD truncation tolerance are clamped at zero.
  Eigen::MatrixXcd scaled_factor() const;
};

struct FactorOptions {
  bool force_iterative = false;   // take the matvec path regardless of size
  std::uint64_t start_seed = 1;   // random start of the iterative path
  double tol = 1e-10;             // relative subspace residual target
  int max_iterations = 10000;
};

/// Top-r factor of a dense operand. Hermitian inputs (within the operand's
/// tolerance) are eigendecomposed and ordered by algebraic eigenvalue;
/// anything else falls back to singular triplets Q_r = U_r S_r U_r^H, the
/// convention used by the perturbation experiments.
SpectralFactor top_r_factor(const HermitianOperand& Q, int r);

/// Top-r factor of a graph Laplacian. Dense solve up to
/// Laplacian::dense_threshold(); beyond that (or when forced) a block power
/// iteration with deflation via orthonormalization, tolerance and iteration
/// cap from `opts`. Throws std::runtime_error if the cap is hit first.
SpectralFactor top_r_factor(const Laplacian& L, int r,
                            const FactorOptions& opts = {});

/// V_r S_r V_r^H as a Hermitian operand (symmetrized, so the Hermitian
/// deviation is exactly zero up to roundoff).
HermitianOperand low_rank_reconstruct(const SpectralFactor& f);

/// delta* = min(min_{j<r} |values[j] - values[j+1]|, values[r-1]).
/// For r = 1 the inner min ranges over nothing and drops away, leaving
/// values[0]. Requires 1 <= r <= values.size().
double eigengap(const std::vector<double>& values, int r);

/// Largest singular value (the operator 2-norm), computed through the
/// Hermitian eigenproblem of M^H M.
double operator_norm(const Eigen::MatrixXcd& M);

} // namespace kcut
