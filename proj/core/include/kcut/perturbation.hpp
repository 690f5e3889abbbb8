#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "kcut/operand.hpp"
#include "kcut/parallel.hpp"

namespace kcut {

/// A planted instance Q = Qstar + H: Qstar is rank-rstar PSD with a known
/// spectrum and seeded random orthonormal eigenvectors, H is complex
/// Gaussian noise. Carries the quantities the bound diagnostics compare
/// against: the planted eigengap delta*, the spectrum, and the incoherence
/// of the top eigenvector.
struct PerturbationInstance {
  HermitianOperand Qstar;
  Eigen::MatrixXcd H;
  int rstar = 0;
  std::vector<double> spectrum; // descending, length rstar
  double eigengap_star = 0.0;   // delta* of the planted spectrum
  double incoherence = 0.0;     // mu-hat = ||u_1||_inf * sqrt(n)
  double noise_scale = 0.0;

  /// Qstar + H as an operand. Not required to be Hermitian: the instance
  /// may carry deliberately unsymmetrized noise.
  HermitianOperand perturbed() const;
};

/// Builds the instance. Qstar = U diag(spectrum) U^H with U the thin Q of a
/// seeded complex Gaussian matrix; H entries have real and imaginary parts
/// i.i.d. N(0, noise_scale^2/2), replaced by (H + H^H)/2 when
/// hermitian_noise is set. The spectrum must be positive and nonincreasing.
PerturbationInstance make_perturbation(int n, int rstar,
                                       const std::vector<double>& spectrum,
                                       double noise_scale,
                                       bool hermitian_noise,
                                       std::uint64_t seed);

/// Additive-error diagnostic: solves the perturbed operand at rank r, then
/// measures how much objective the winner loses on the clean Qstar against
/// the exhaustive optimum. The comparison scale carries no absolute
/// constant, so the record reports the implied constant rather than
/// asserting the inequality.
struct AdditiveDiagnostic {
  bool precondition_ok = false; // ||H||_2 <= delta*/2
  double h_norm = 0.0;
  double opt_star = 0.0; // oracle optimum of Qstar
  double achieved = 0.0; // Re(z_r^H Qstar z_r) for the rank-r winner
  double lhs = 0.0;      // |opt_star - achieved|
  double rhs_core = 0.0; // n * (lambda_{r+1}* + (lambda_1*/delta*)||H||_2)
  double implied_constant = 0.0; // lhs / rhs_core, 0 when rhs_core is 0
};

AdditiveDiagnostic check_additive_bound(const PerturbationInstance& inst,
                                        int r, int K,
                                        const ParallelConfig& par = {});

/// Relative counterpart: the achieved fraction of the clean optimum next to
/// the spectral guide value the theory predicts it should track.
struct MultiplicativeDiagnostic {
  bool precondition_ok = false; // K >= 3
  double h_norm = 0.0;
  double opt_star = 0.0;
  double achieved = 0.0;
  double ratio = 0.0; // achieved / opt_star, 1 when opt_star is 0
  double guide = 0.0; // 1 - (lambda_{r+1}*/lambda_1* + ||H||_2/delta*)
  double incoherence = 0.0;
};

MultiplicativeDiagnostic check_multiplicative_bound(
    const PerturbationInstance& inst, int r, int K,
    const ParallelConfig& par = {});

} // namespace kcut
