#include "kcut/assignment.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kcut {

Assignment::Assignment(std::vector<int> l, int k) : labels(std::move(l)), K(k) {
  if (K < 2) {
    throw std::invalid_argument("assignment requires K >= 2");
  }
  for (int v : labels) {
    if (v < 0 || v >= K) {
      throw std::invalid_argument("assignment label out of range [0, K)");
    }
  }
}

Eigen::VectorXcd Assignment::symbols() const {
  const double step = 2.0 * std::numbers::pi / K;
  Eigen::VectorXcd z(size());
  for (int i = 0; i < size(); ++i) {
    z(i) = Cplx(std::cos(step * labels[i]), std::sin(step * labels[i]));
  }
  return z;
}

Assignment rotate(const Assignment& a, int t) {
  Assignment out = a;
  const int shift = ((t % a.K) + a.K) % a.K;
  for (int& v : out.labels) {
    v = (v + shift) % a.K;
  }
  return out;
}

Assignment canonical_form(const Assignment& a) {
  if (a.labels.empty() || a.labels[0] == 0) {
    return a;
  }
  return rotate(a, a.K - a.labels[0]);
}

bool lex_less(const Assignment& a, const Assignment& b) {
  return a.labels < b.labels;
}

} // namespace kcut
