#include "kcut/perturbation.hpp"

#include <cmath>
#include <stdexcept>

#include "kcut/pipeline.hpp"
#include "kcut/rng.hpp"
#include "kcut/spectra.hpp"

namespace kcut {

HermitianOperand PerturbationInstance::perturbed() const {
  return HermitianOperand(Qstar.entries + H);
}

PerturbationInstance make_perturbation(int n, int rstar,
                                       const std::vector<double>& spectrum,
                                       double noise_scale,
                                       bool hermitian_noise,
                                       std::uint64_t seed) {
  if (n < 1 || rstar < 1 || rstar > n) {
    throw std::invalid_argument("make_perturbation requires 1 <= rstar <= n");
  }
  if (static_cast<int>(spectrum.size()) != rstar) {
    throw std::invalid_argument("spectrum must have length rstar");
  }
  for (int i = 0; i < rstar; ++i) {
    if (!(spectrum[static_cast<std::size_t>(i)] > 0.0)) {
      throw std::invalid_argument("spectrum must be positive");
    }
    if (i > 0 && spectrum[static_cast<std::size_t>(i)] >
                     spectrum[static_cast<std::size_t>(i - 1)]) {
      throw std::invalid_argument("spectrum must be nonincreasing");
    }
  }
  if (noise_scale < 0.0) {
    throw std::invalid_argument("noise scale must be nonnegative");
  }

  Rng rng(seed);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  Eigen::MatrixXcd G(n, rstar);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < rstar; ++j) {
      G(i, j) = Cplx(rng.normal(), rng.normal()) * inv_sqrt2;
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
  const Eigen::MatrixXcd U =
      qr.householderQ() * Eigen::MatrixXcd::Identity(n, rstar);

  Eigen::VectorXd vals(rstar);
  for (int i = 0; i < rstar; ++i) vals(i) = spectrum[static_cast<std::size_t>(i)];
  Eigen::MatrixXcd Qs = U * vals.asDiagonal() * U.adjoint();
  Qs = 0.5 * (Qs + Qs.adjoint().eval());

  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
  if (noise_scale > 0.0) {
    const double s = noise_scale * inv_sqrt2;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        H(i, j) = Cplx(s * rng.normal(), s * rng.normal());
      }
    }
    if (hermitian_noise) H = 0.5 * (H + H.adjoint().eval());
  }

  PerturbationInstance inst;
  inst.Qstar = HermitianOperand(std::move(Qs), 1e-9, /*psd_hint=*/true);
  inst.H = std::move(H);
  inst.rstar = rstar;
  inst.spectrum = spectrum;
  inst.eigengap_star = eigengap(spectrum, rstar);
  inst.incoherence = U.col(0).cwiseAbs().maxCoeff() * std::sqrt(double(n));
  inst.noise_scale = noise_scale;
  return inst;
}

namespace {

struct SolvedPair {
  double h_norm = 0.0;
  double opt_star = 0.0;
  double achieved = 0.0;
  double lambda_next = 0.0; // lambda_{r+1}*, 0 past the planted rank
};

SolvedPair solve_pair(const PerturbationInstance& inst, int r, int K,
                      const ParallelConfig& par) {
  SolvedPair p;
  p.h_norm = operator_norm(inst.H);
  p.opt_star = brute_force_oracle(inst.Qstar, K).objective;
  const SolveReport rep = approximate_low_rank(inst.perturbed(), r, K, par);
  p.achieved = quadratic_form(inst.Qstar, rep.assignment);
  p.lambda_next =
      r < inst.rstar ? inst.spectrum[static_cast<std::size_t>(r)] : 0.0;
  return p;
}

} // namespace

AdditiveDiagnostic check_additive_bound(const PerturbationInstance& inst,
                                        int r, int K,
                                        const ParallelConfig& par) {
  const SolvedPair p = solve_pair(inst, r, K, par);
  AdditiveDiagnostic d;
  d.h_norm = p.h_norm;
  d.opt_star = p.opt_star;
  d.achieved = p.achieved;
  d.precondition_ok = p.h_norm <= inst.eigengap_star / 2.0;
  d.lhs = std::abs(p.opt_star - p.achieved);
  const double n = inst.Qstar.n();
  const double scale_term =
      p.h_norm > 0.0 ? (inst.spectrum[0] / inst.eigengap_star) * p.h_norm
                     : 0.0;
  d.rhs_core = n * (p.lambda_next + scale_term);
  d.implied_constant = d.rhs_core > 0.0 ? d.lhs / d.rhs_core : 0.0;
  return d;
}

MultiplicativeDiagnostic check_multiplicative_bound(
    const PerturbationInstance& inst, int r, int K,
    const ParallelConfig& par) {
  const SolvedPair p = solve_pair(inst, r, K, par);
  MultiplicativeDiagnostic d;
  d.precondition_ok = K >= 3;
  d.h_norm = p.h_norm;
  d.opt_star = p.opt_star;
  d.achieved = p.achieved;
  d.ratio = p.opt_star > 0.0 ? p.achieved / p.opt_star : 1.0;
  const double gap_term =
      p.h_norm > 0.0 ? p.h_norm / inst.eigengap_star : 0.0;
  d.guide = 1.0 - (p.lambda_next / inst.spectrum[0] + gap_term);
  d.incoherence = inst.incoherence;
  return d;
}

} // namespace kcut
