#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "kcut/operand.hpp"
#include "kcut/parallel.hpp"

namespace kcut {

/// Per-coordinate geometry of the rank-1 maximization of |z^H q| over A_K^n.
/// As a global phase rotates the target, coordinate i switches its optimal
/// label exactly when the phase of q_i crosses a bisector between adjacent
/// roots; phi[i] locates that first crossing inside (-pi/K, pi/K] and k0[i]
/// is the optimal label before any crossing. Sweeping the crossings in
/// ascending phi order visits every optimal-assignment cell exactly once,
/// which yields n+1 candidate assignments in total.
struct BoundarySchedule {
  int K = 0;
  std::vector<double> theta; // phase of q_i normalized to [0, 2*pi)
  std::vector<double> phi;   // first crossing, in (-pi/K, pi/K]
  std::vector<int> k0;       // floor(K * theta / (2*pi)), in [0, K)
  std::vector<int> order;    // coordinates sorted by ascending phi, ties by index

  int n() const { return static_cast<int>(theta.size()); }
};

/// Builds the schedule. Zero entries get theta = 0 by convention.
BoundarySchedule boundary_schedule(const Eigen::VectorXcd& q, int K);

/// Streams the n+1 candidates in schedule order. `visit(t, labels)` receives
/// candidate index t (0 = the pure-k0 assignment; t >= 1 additionally
/// increments the label at order[0..t-1], each by +1 mod K) and the label
/// vector, which is reused between calls. Return false to stop early.
void enumerate_rank1_candidates(
    const BoundarySchedule& s,
    const std::function<bool(std::int64_t, const std::vector<int>&)>& visit);

struct Rank1Result {
  Assignment assignment;           // canonical winner
  double factor_objective = 0.0;   // |z^H q|^2 of the winner
  std::int64_t candidates = 0;
  bool timed_out = false;
};

/// Races all n+1 candidates by |z^H q|, ties broken toward the
/// lexicographically smaller canonical assignment. Every candidate is scored
/// from scratch in O(n), so results are bit-identical for any worker count.
Rank1Result maximize_rank1(const Eigen::VectorXcd& q, int K,
                           const ParallelConfig& par = {},
                           const Deadline& deadline = {});

struct Rank1Solution {
  Assignment assignment;
  double objective = 0.0; // Re(z^H Q z) of the winner against Q
  std::int64_t candidates = 0;
  bool timed_out = false;
};

/// Exact solve of max Re(z^H Q z) for Q = lambda q q^H (q the unit
/// eigenvector of the rank-1 part); the winner is re-scored against Q.
Rank1Solution solve_rank1(const HermitianOperand& Q, const Eigen::VectorXcd& q,
                          int K, const ParallelConfig& par = {},
                          const Deadline& deadline = {});

} // namespace kcut
