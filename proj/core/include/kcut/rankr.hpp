#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "kcut/operand.hpp"
#include "kcut/parallel.hpp"

namespace kcut {

/// Realification of the boundary conditions for maximizing ||V^H z||^2 over
/// A_K^n. For each bisector line m and coordinate i the condition
/// Im(rho_m * V.row(i) * c) = 0 becomes one real row
/// [Re(rho_m V.row(i)) | Im(rho_m V.row(i))] in R^{2r}, where
/// rho_m = exp(-i*theta_m) rotates the bisector onto the real axis. The
/// complex direction is recovered from a real null vector by pairing halves
/// as c = c~[r:2r] + i*c~[0:r]; under that pairing, row j dotted with c~
/// equals Im(rho_m V.row(i) c) exactly.
///
/// Rows are stacked in b_k blocks of n: row j = m*n + i, so rows of
/// coordinate group i are {i, i+n, ..., i+(b_k-1)n}.
struct AugmentedSystem {
  int n = 0;
  int r = 0;
  int K = 0;
  int b_k = 0;
  Eigen::MatrixXd rows;         // (n*b_k) x 2r
  std::vector<Cplx> rotations;  // rho_m, m = 0..b_k-1

  int row_count() const { return n * b_k; }
  int group_of_row(int j) const { return j % n; }
};

AugmentedSystem build_augmented(const Eigen::MatrixXcd& V, int K);

/// c = c~[r:2r] + i*c~[0:r], the complex direction of a real null vector.
Eigen::VectorXcd complex_direction(const Eigen::VectorXd& c_tilde, int r);

/// Lazy lexicographic stream over the index sets that define vertices:
/// sorted (2r-1)-subsets of the rows with at most 2 rows per coordinate
/// group (a third row of one group is linearly dependent on the other two,
/// so such sets never have full rank). Never materialized.
class IndexSetStream {
public:
  IndexSetStream(int row_count, int group_count, int size);

  /// Advances to the next valid set; false when exhausted. `out` is resized
  /// to `size` and filled in ascending order.
  bool next(std::vector<int>& out);

private:
  int rows_;
  int groups_;
  int size_;
  bool done_ = false;
  bool started_ = false;
  std::vector<int> cur_;
  std::vector<int> usage_;
};

IndexSetStream stream_valid_index_sets(const AugmentedSystem& sys);

/// Unit null vector of the (2r-1) x 2r submatrix sys.rows(I, :), or nullopt
/// when the submatrix is numerically rank-deficient (smallest singular value
/// at most rank_tol times the largest). The returned c~ satisfies
/// ||rows(I) * c~||_inf <= residual_tol.
std::optional<Eigen::VectorXd> vertex_nullvector(const AugmentedSystem& sys,
                                                 const std::vector<int>& I);

constexpr double kRankTol = 1e-9;
constexpr double kVertexResidualTol = 1e-8;
constexpr int kExpansionCap = 4096;
constexpr int kFallbackPerturbations = 64;

/// All assignments the decision rule emits at the vertex c: each coordinate
/// takes the root nearest to arg(V.row(i)*c); a coordinate on a bisector
/// (exactly one row of its group in I lands it there) contributes both
/// adjacent labels, a coordinate with V.row(i)*c = 0 (two rows in I)
/// contributes all K labels, and the combinations are expanded up to
/// kExpansionCap (beyond that, kFallbackPerturbations random perturbations
/// of c). Identically zero factor rows are pinned to label 0.
std::vector<Assignment> expand_vertex(const Eigen::MatrixXcd& V,
                                      const Eigen::VectorXcd& c,
                                      const std::vector<int>& I,
                                      const AugmentedSystem& sys);

struct RankRResult {
  Assignment assignment;          // canonical winner
  double factor_objective = 0.0;  // ||V^H z||^2 of the winner
  std::int64_t candidates = 0;    // accepted vertices + recursive candidates
  bool timed_out = false;
  double max_vertex_residual = 0.0;   // max ||rows(I) c~||_inf over accepted
  double max_unit_norm_error = 0.0;   // max | ||c~||_2 - 1 | over accepted
};

/// Exact maximization of ||V^H z||^2 over A_K^n for a rank-r factor V.
/// Enumerates every vertex of the boundary arrangement (one candidate per
/// accepted index set, both signs of the null direction explored), recurses
/// on the leading r-1 columns, and races everything under the deterministic
/// (objective, canonical assignment) order. Results are identical for any
/// worker count.
RankRResult maximize_rankr(const Eigen::MatrixXcd& V, int K,
                           const ParallelConfig& par = {},
                           const Deadline& deadline = {});

struct RankRSolution {
  Assignment assignment;
  double objective = 0.0; // Re(z^H Q z) of the winner against Q
  std::int64_t candidates = 0;
  bool timed_out = false;
  double max_vertex_residual = 0.0;
  double max_unit_norm_error = 0.0;
};

/// Races candidates by the factor objective ||V^H z||^2 (O(nr) each), then
/// re-scores only the winner against the dense Q. V must hold the scaled
/// factor of the rank-r part of Q, columns ordered by descending value.
/// Throws std::invalid_argument when 2r-1 exceeds the augmented row count.
RankRSolution solve_rankr(const HermitianOperand& Q, const Eigen::MatrixXcd& V,
                          int r, int K, const ParallelConfig& par = {},
                          const Deadline& deadline = {});

/// Upper bound on the candidate count of maximize_rankr: the sum over
/// recursion levels d of the number of valid index sets, evaluated both as
/// the closed-form bound and as its per-step variant (which carries an extra
/// C(b_k, 2)^i factor and one more power of b_k); the larger of the two is
/// returned, saturating at UINT64_MAX. O(n^{2r-1}) for fixed r, K.
std::uint64_t candidate_count_bound(int n, int r, int K);

} // namespace kcut
