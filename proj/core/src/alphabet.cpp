#include "kcut/alphabet.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kcut {

Alphabet make_alphabet(int K) {
  if (K < 2) {
    throw std::invalid_argument("alphabet requires K >= 2, got K = " +
                                std::to_string(K));
  }
  Alphabet a;
  a.K = K;
  a.roots.reserve(static_cast<std::size_t>(K));
  const double step = 2.0 * std::numbers::pi / K;
  for (int k = 0; k < K; ++k) {
    a.roots.emplace_back(std::cos(step * k), std::sin(step * k));
  }
  a.b_k = (K % 2 == 0) ? K / 2 : K;
  a.boundary_angles.reserve(static_cast<std::size_t>(a.b_k));
  for (int m = 0; m < a.b_k; ++m) {
    a.boundary_angles.push_back(std::numbers::pi * (2 * m + 1) / K);
  }
  return a;
}

} // namespace kcut
