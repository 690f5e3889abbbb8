#include "kcut/rank1.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "kcut/alphabet.hpp"

namespace kcut {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Contender {
  bool valid = false;
  double objective = 0.0;
  std::vector<int> canonical;

  /// True if (objective, canonical) beats the current holder. Exact-equality
  /// ties go to the lexicographically smaller canonical labels, which makes
  /// the reduction order-independent.
  bool beaten_by(double obj, const std::vector<int>& canon) const {
    if (!valid) return true;
    if (obj != objective) return obj > objective;
    return canon < canonical;
  }
};

std::vector<int> canonical_labels(const std::vector<int>& labels, int K) {
  if (labels.empty() || labels[0] == 0) return labels;
  std::vector<int> out(labels.size());
  const int shift = K - labels[0];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = (labels[i] + shift) % K;
  }
  return out;
}

} // namespace

BoundarySchedule boundary_schedule(const Eigen::VectorXcd& q, int K) {
  if (K < 2) {
    throw std::invalid_argument("boundary_schedule requires K >= 2");
  }
  const int n = static_cast<int>(q.size());
  BoundarySchedule s;
  s.K = K;
  s.theta.resize(n);
  s.phi.resize(n);
  s.k0.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = (q(i) == Cplx(0.0, 0.0)) ? 0.0 : std::atan2(q(i).imag(), q(i).real());
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0; // atan2(-0-ish) + 2*pi can round up to 2*pi
    const double scaled = K * t / kTwoPi;
    int k = static_cast<int>(std::floor(scaled));
    if (k >= K) k = K - 1;
    s.theta[i] = t;
    s.k0[i] = k;
    s.phi[i] = (kTwoPi / K) * (0.5 + k - scaled);
  }
  s.order.resize(n);
  std::iota(s.order.begin(), s.order.end(), 0);
  std::sort(s.order.begin(), s.order.end(), [&s](int a, int b) {
    if (s.phi[a] != s.phi[b]) return s.phi[a] < s.phi[b];
    return a < b;
  });
  return s;
}

void enumerate_rank1_candidates(
    const BoundarySchedule& s,
    const std::function<bool(std::int64_t, const std::vector<int>&)>& visit) {
  std::vector<int> labels = s.k0;
  if (!visit(0, labels)) return;
  for (int t = 0; t < s.n(); ++t) {
    const int i = s.order[static_cast<std::size_t>(t)];
    labels[static_cast<std::size_t>(i)] =
        (labels[static_cast<std::size_t>(i)] + 1) % s.K;
    if (!visit(t + 1, labels)) return;
  }
}

Rank1Result maximize_rank1(const Eigen::VectorXcd& q, int K,
                           const ParallelConfig& par, const Deadline& deadline) {
  const BoundarySchedule s = boundary_schedule(q, K);
  const int n = s.n();
  if (n == 0) {
    throw std::invalid_argument("maximize_rank1 requires a nonempty vector");
  }
  const Alphabet alpha = make_alphabet(K);
  const std::int64_t total = static_cast<std::int64_t>(n) + 1;
  const std::int64_t batch = par.batch_size_for(total);
  const std::int64_t num_batches = (total + batch - 1) / batch;

  std::vector<Contender> best(static_cast<std::size_t>(num_batches));
  std::atomic<bool> stop{false};

  auto run_batch = [&](std::int64_t b) {
    if (deadline.expired()) {
      stop.store(true, std::memory_order_relaxed);
      return;
    }
    const std::int64_t lo = b * batch;
    const std::int64_t hi = std::min(total, lo + batch);

    // Reconstruct the label state at candidate lo, then walk the chunk.
    // Each candidate is scored from scratch so the arithmetic per candidate
    // does not depend on where chunk boundaries fall.
    std::vector<int> labels = s.k0;
    Eigen::VectorXcd z(n);
    for (std::int64_t t = 0; t < lo; ++t) {
      const int i = s.order[static_cast<std::size_t>(t)];
      labels[static_cast<std::size_t>(i)] =
          (labels[static_cast<std::size_t>(i)] + 1) % K;
    }
    for (int i = 0; i < n; ++i) {
      z(i) = alpha.roots[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }

    Contender& local = best[static_cast<std::size_t>(b)];
    for (std::int64_t t = lo; t < hi; ++t) {
      if (t > lo) {
        const int i = s.order[static_cast<std::size_t>(t - 1)];
        auto& li = labels[static_cast<std::size_t>(i)];
        li = (li + 1) % K;
        z(i) = alpha.roots[static_cast<std::size_t>(li)];
      }
      const double obj = std::norm(z.dot(q)); // |z^H q|^2
      if (!local.valid || obj > local.objective ||
          (obj == local.objective &&
           canonical_labels(labels, K) < local.canonical)) {
        local.valid = true;
        local.objective = obj;
        local.canonical = canonical_labels(labels, K);
      }
    }
  };

  run_batches(num_batches, par.workers, stop, run_batch);

  Rank1Result out;
  out.candidates = total;
  out.timed_out = stop.load();
  Contender winner;
  for (const auto& c : best) {
    if (c.valid && winner.beaten_by(c.objective, c.canonical)) {
      winner.valid = true;
      winner.objective = c.objective;
      winner.canonical = c.canonical;
    }
  }
  if (!winner.valid) {
    // Timed out before any batch finished: fall back to the base candidate.
    winner.valid = true;
    winner.canonical = canonical_labels(s.k0, K);
    Eigen::VectorXcd z(n);
    for (int i = 0; i < n; ++i) {
      z(i) = alpha.roots[static_cast<std::size_t>(winner.canonical[static_cast<std::size_t>(i)])];
    }
    winner.objective = std::norm(z.dot(q));
  }
  out.assignment = Assignment(std::move(winner.canonical), K);
  out.factor_objective = winner.objective;
  return out;
}

Rank1Solution solve_rank1(const HermitianOperand& Q, const Eigen::VectorXcd& q,
                          int K, const ParallelConfig& par,
                          const Deadline& deadline) {
  if (Q.n() != q.size()) {
    throw std::invalid_argument("eigenvector dimension does not match operand");
  }
  const Rank1Result r = maximize_rank1(q, K, par, deadline);
  Rank1Solution out;
  out.objective = quadratic_form(Q, r.assignment);
  out.assignment = r.assignment;
  out.candidates = r.candidates;
  out.timed_out = r.timed_out;
  return out;
}

} // namespace kcut
