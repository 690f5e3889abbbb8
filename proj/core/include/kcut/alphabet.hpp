#pragma once

#include <complex>
#include <vector>

namespace kcut {

using Cplx = std::complex<double>;

/// The K-th roots of unity {exp(2*pi*i*k/K) : k = 0..K-1} together with the
/// geometry needed by the solvers: the bisector angles between adjacent roots
/// and the number of distinct bisector *lines* through the origin.
///
/// Adjacent roots k and k+1 are separated by the bisector ray at angle
/// theta_m = pi*(2m+1)/K. Rays m and m + K/2 coincide as lines when K is
/// even, so the arrangement has b_k = K/2 lines for even K and b_k = K for
/// odd K (each ray is its own line; the opposite ray points at a root).
struct Alphabet {
  int K = 0;
  std::vector<Cplx> roots;             // roots[k] = exp(2*pi*i*k/K)
  std::vector<double> boundary_angles; // theta_m = pi*(2m+1)/K, m = 0..b_k-1
  int b_k = 0;
};

/// Builds the alphabet for K >= 2. Throws std::invalid_argument otherwise.
Alphabet make_alphabet(int K);

} // namespace kcut
