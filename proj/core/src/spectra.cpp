#include "kcut/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kcut/rng.hpp"

namespace kcut {

namespace {

/// Rotates each column so its largest-magnitude entry is real nonnegative
/// (first such entry on magnitude ties). Fixes the phase/sign freedom of
/// eigenvectors so factorizations are reproducible.
void fix_column_phases(Eigen::MatrixXcd& V) {
  for (Eigen::Index c = 0; c < V.cols(); ++c) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
      const double a = std::abs(V(i, c));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    if (best > 0.0) {
      const Cplx pivot = V(imax, c);
      V.col(c) *= std::conj(pivot) / std::abs(pivot);
    }
  }
}

void check_rank_request(int r, int n) {
  if (r < 1 || r > n) {
    throw std::invalid_argument("rank must satisfy 1 <= r <= n");
  }
}

SpectralFactor from_pairs(const Eigen::VectorXd& all_values,
                          const Eigen::MatrixXcd& all_vectors, int r) {
  SpectralFactor f;
  f.n = static_cast<int>(all_vectors.rows());
  f.r = r;
  f.values = all_values.head(r);
  f.vectors = all_vectors.leftCols(r);
  f.residual_estimate = r < all_values.size() ? all_values(r) : 0.0;
  fix_column_phases(f.vectors);
  return f;
}

} // namespace

Eigen::MatrixXcd SpectralFactor::scaled_factor() const {
  Eigen::VectorXd s = values.cwiseMax(0.0).cwiseSqrt();
  return vectors * s.asDiagonal();
}

SpectralFactor top_r_factor(const HermitianOperand& Q, int r) {
  check_rank_request(r, Q.n());
  if (Q.is_hermitian()) {
    // Symmetrize away the sub-tolerance deviation so the solver sees an
    // exactly self-adjoint matrix.
    const Eigen::MatrixXcd A = (Q.entries + Q.entries.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("dense eigendecomposition failed");
    }
    // Eigen returns ascending order; flip to nonincreasing.
    const Eigen::VectorXd vals = es.eigenvalues().reverse();
    const Eigen::MatrixXcd vecs = es.eigenvectors().rowwise().reverse();
    return from_pairs(vals, vecs, r);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Q.entries, Eigen::ComputeThinU);
  return from_pairs(svd.singularValues(), svd.matrixU(), r);
}

SpectralFactor top_r_factor(const Laplacian& L, int r,
                            const FactorOptions& opts) {
  check_rank_request(r, L.n());
  const int n = L.n();
  if (!opts.force_iterative && n <= Laplacian::dense_threshold()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L.dense());
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("dense eigendecomposition failed");
    }
    const Eigen::VectorXd vals = es.eigenvalues().reverse();
    const Eigen::MatrixXcd vecs =
        es.eigenvectors().rowwise().reverse().cast<Cplx>();
    return from_pairs(vals, vecs, r);
  }

  // Block power iteration on the real symmetric Laplacian. One extra vector
  // rides along to estimate lambda_{r+1}; orthonormalizing the block every
  // step deflates converged directions implicitly. The Laplacian of a graph
  // with negative weights can be indefinite, so iterate on Q + s*I with a
  // Gershgorin shift s that makes the top algebraic eigenvalues dominant.
  const int b = std::min(n, r + 1);
  double shift = 0.0;
  {
    const auto& M = L.matrix();
    for (int col = 0; col < n; ++col) {
      double off = 0.0, diag = 0.0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(M, col); it; ++it) {
        if (it.row() == col) {
          diag = it.value();
        } else {
          off += std::abs(it.value());
        }
      }
      shift = std::max(shift, off - diag);
    }
    shift = std::max(shift, 0.0);
  }

  Rng rng(opts.start_seed);
  Eigen::MatrixXd X(n, b);
  for (int j = 0; j < b; ++j) {
    for (int i = 0; i < n; ++i) X(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr0(X);
  X = qr0.householderQ() * Eigen::MatrixXd::Identity(n, b);

  Eigen::MatrixXd Y;
  for (int it = 0; it < opts.max_iterations; ++it) {
    Y = L.apply(X) + shift * X;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    X = qr.householderQ() * Eigen::MatrixXd::Identity(n, b);

    const Eigen::MatrixXd AX = L.apply(X);
    const Eigen::MatrixXd T = X.transpose() * AX;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(T);
    // Descending Ritz order.
    Eigen::VectorXd tv = small.eigenvalues().reverse();
    Eigen::MatrixXd tw = small.eigenvectors().rowwise().reverse();
    const Eigen::MatrixXd XR = X * tw;
    const Eigen::MatrixXd R = AX * tw - XR * tv.asDiagonal();
    const double scale = std::max(1.0, std::abs(tv(0)));
    double worst = 0.0;
    for (int j = 0; j < r; ++j) {
      worst = std::max(worst, R.col(j).norm() / scale);
    }
    if (worst <= opts.tol) {
      SpectralFactor f;
      f.n = n;
      f.r = r;
      f.values = tv.head(r);
      f.vectors = XR.leftCols(r).cast<Cplx>();
      f.residual_estimate = b > r ? tv(r) : 0.0;
      fix_column_phases(f.vectors);
      return f;
    }
  }
  throw std::runtime_error(
      "block power iteration did not converge within the iteration cap");
}

HermitianOperand low_rank_reconstruct(const SpectralFactor& f) {
  Eigen::MatrixXcd A =
      f.vectors * f.values.asDiagonal() * f.vectors.adjoint();
  A = (A + A.adjoint()) / 2.0;
  const bool psd = f.values.size() == 0 || f.values.minCoeff() >= 0.0;
  return HermitianOperand(std::move(A), 1e-9, psd);
}

double eigengap(const std::vector<double>& values, int r) {
  if (r < 1 || static_cast<std::size_t>(r) > values.size()) {
    throw std::invalid_argument("eigengap requires 1 <= r <= values.size()");
  }
  double gap = values[static_cast<std::size_t>(r) - 1];
  for (int j = 0; j + 1 < r; ++j) {
    gap = std::min(gap, std::abs(values[j] - values[j + 1]));
  }
  return gap;
}

double operator_norm(const Eigen::MatrixXcd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M.adjoint() * M,
                                                     Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

} // namespace kcut
