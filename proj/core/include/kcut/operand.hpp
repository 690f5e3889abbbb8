#pragma once

#include <Eigen/Dense>

#include "kcut/assignment.hpp"

namespace kcut {

/// Dense complex matrix wrapped with the metadata the solvers care about:
/// whether it measured Hermitian within tolerance and whether the producer
/// promises positive semidefiniteness. The entries are never mutated after
/// construction, so operands are safe to share across worker threads.
struct HermitianOperand {
  Eigen::MatrixXcd entries;
  double hermitian_tol = 1e-9;
  bool is_psd_hint = false;

  HermitianOperand() = default;

  /// Wraps a square matrix. `require_hermitian` turns a tolerance violation
  /// into std::invalid_argument; otherwise the deviation is only recorded
  /// (perturbation experiments legitimately construct non-Hermitian sums).
  explicit HermitianOperand(Eigen::MatrixXcd m, double tol = 1e-9,
                            bool psd_hint = false,
                            bool require_hermitian = false);

  int n() const { return static_cast<int>(entries.rows()); }
  bool is_hermitian() const { return hermitian_ok_; }
  double frobenius_norm() const { return frobenius_; }
  double hermitian_deviation() const { return hermitian_dev_; }

private:
  bool hermitian_ok_ = true;
  double frobenius_ = 0.0;
  double hermitian_dev_ = 0.0;
};

/// Re(z^H Q z) for the symbol vector z of `a`. For a Hermitian operand the
/// imaginary part is pure roundoff; it must stay below 1e-8 * ||Q||_F or the
/// call throws, since a larger residue means the operand was mislabeled.
double quadratic_form(const HermitianOperand& Q, const Assignment& a);

/// ||V^H z||^2, the quadratic form of the factorized operand V V^H evaluated
/// without materializing it. O(n*r) per call.
double factor_quadratic_form(const Eigen::MatrixXcd& V, const Assignment& a);

} // namespace kcut
