#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "kcut/graph.hpp"
#include "kcut/operand.hpp"
#include "kcut/parallel.hpp"
#include "kcut/spectra.hpp"

namespace kcut {

/// One solver run in machine-readable form, the report of record for the
/// CLI and the benchmark tables. `objective` is recomputed against the
/// original operand at report time, never copied from the race.
struct SolveReport {
  std::string algorithm;
  int rank = 0;
  int K = 0;
  int n = 0;
  std::int64_t m = 0;              // edge count when the input is a graph
  double objective = 0.0;          // Re(z^H Q z) of the reported assignment
  std::optional<double> cut_value; // graph inputs with K = 3 only
  Assignment assignment;           // canonical
  std::int64_t candidates_evaluated = 0;
  std::int64_t wall_time_ms = 0;
  int workers = 1;
  std::optional<std::uint64_t> seed;
  bool timed_out = false;
  std::string input; // path or generator tag, filled by the caller
};

/// Low-rank approximate solve: top-r factor of Q, exact maximization of the
/// factor objective over A_K^n, winner re-scored against the original Q.
SolveReport approximate_low_rank(const HermitianOperand& Q, int r, int K,
                                 const ParallelConfig& par = {},
                                 const Deadline& deadline = {});

/// Same pipeline for a graph Laplacian; never densifies the operand, so it
/// works at any n. Reports the cut value when K = 3. `fopts` reaches the
/// iterative eigensolver (seeded start, forced iterative path).
SolveReport approximate_low_rank(const WeightedGraph& g, int r, int K,
                                 const ParallelConfig& par = {},
                                 const Deadline& deadline = {},
                                 const FactorOptions& fopts = {});

struct OracleResult {
  Assignment assignment; // canonical: labels[0] == 0 by construction
  double objective = 0.0;
  std::int64_t evaluated = 0;
};

/// Refusal threshold for the exhaustive oracle, K^(n-1) assignments.
constexpr std::int64_t kOracleCap = 10'000'000;

/// Exhaustive maximum of Re(z^H Q z) over assignments with labels[0] = 0
/// (a global phase never changes the form, so this loses nothing). Ties go
/// to the lexicographically smaller label vector. Throws std::length_error
/// when K^(n-1) exceeds kOracleCap.
OracleResult brute_force_oracle(const HermitianOperand& Q, int K);

/// Best of n+1 uniform random assignments by cut value, ties toward the
/// lexicographically smaller canonical form. Deterministic given the seed.
SolveReport random_baseline(const WeightedGraph& g, int K, std::uint64_t seed);

/// Locks one (node, label) pair at a time, maximizing the immediate cut
/// gain against already-locked nodes; ties prefer the lowest node index,
/// then the lowest label. The first pick is the highest-weighted-degree
/// node (lowest index on ties) at label 0. On deadline expiry the remaining
/// nodes take label 0 and the report is flagged timed out.
SolveReport greedy_baseline(const WeightedGraph& g, int K,
                            const Deadline& deadline = {});

} // namespace kcut
