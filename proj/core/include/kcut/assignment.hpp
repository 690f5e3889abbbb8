#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kcut/alphabet.hpp"

namespace kcut {

/// A point of the solution lattice A_K^n, stored as integer labels
/// labels[i] in [0, K). The complex symbols are materialized on demand.
struct Assignment {
  std::vector<int> labels;
  int K = 0;

  Assignment() = default;
  Assignment(std::vector<int> l, int k);

  int size() const { return static_cast<int>(labels.size()); }

  /// Symbol vector z with z_i = exp(2*pi*i*labels[i]/K).
  Eigen::VectorXcd symbols() const;
};

/// Rotates every label by t (mod K); the symbol vector picks up the global
/// phase exp(2*pi*i*t/K), which leaves any quadratic form unchanged.
Assignment rotate(const Assignment& a, int t);

/// The canonical representative of the global-phase orbit: labels rotated so
/// that labels[0] == 0. Empty assignments are already canonical.
Assignment canonical_form(const Assignment& a);

/// Lexicographic comparison of label vectors, the deterministic tie-break
/// used by every solver when objectives are exactly equal.
bool lex_less(const Assignment& a, const Assignment& b);

} // namespace kcut
