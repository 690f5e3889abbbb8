#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <vector>

#include "kcut/operand.hpp"

namespace kcut {

/// Simple weighted undirected graph: no self-loops, no duplicate edges,
/// endpoints stored with u < v. Weights may be negative or fractional.
struct WeightedGraph {
  struct Edge {
    int u = 0;
    int v = 0;
    double w = 1.0;
  };

  int n = 0;
  std::vector<Edge> edges;

  std::int64_t m() const { return static_cast<std::int64_t>(edges.size()); }
};

/// Validates and normalizes edge endpoints (orders u < v, rejects loops and
/// duplicates). Throws std::invalid_argument on violation.
WeightedGraph make_graph(int n, std::vector<WeightedGraph::Edge> edges);

/// G(n, p): every unordered pair independently with probability p, weight 1.
/// Deterministic in (n, p, seed); uses geometric skipping so the cost is
/// O(edges), not O(n^2).
WeightedGraph generate_er(int n, double p, std::uint64_t seed);

/// Random d-regular graph via the pairing model. Colliding stubs (self-loops
/// or duplicate edges) are re-paired in repair rounds; a stalled round
/// triggers a full restart. After 100 restarts/stalls the call throws.
/// Requires n*d even and d < n.
WeightedGraph generate_regular(int n, int d, std::uint64_t seed);

/// rows x cols grid with wraparound in both directions; 4-regular with
/// 2*rows*cols edges. Requires rows, cols >= 3 so wraparound edges stay
/// distinct.
WeightedGraph generate_torus(int rows, int cols);

/// Graph Laplacian Q = D - W. Held sparse unconditionally (the quadratic
/// form and the iterative eigensolver only need matvecs); the dense mirror
/// is materialized on demand for n <= dense_threshold().
class Laplacian {
public:
  explicit Laplacian(const WeightedGraph& g);

  static constexpr int dense_threshold() { return 4096; }

  int n() const { return n_; }
  const Eigen::SparseMatrix<double>& matrix() const { return mat_; }
  const Eigen::VectorXd& degrees() const { return deg_; }

  /// Dense real mirror of the (real symmetric) Laplacian.
  /// Throws std::length_error above dense_threshold().
  Eigen::MatrixXd dense() const;

  /// Dense complex operand view, for callers that need HermitianOperand.
  HermitianOperand dense_operand() const;

  /// y = Q x for real block x.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;

  /// Re(z^H Q z) via one sparse matvec; works at any n.
  double quadratic_form_of(const Assignment& a) const;

private:
  int n_ = 0;
  Eigen::SparseMatrix<double> mat_;
  Eigen::VectorXd deg_;
};

inline Laplacian laplacian(const WeightedGraph& g) { return Laplacian(g); }

/// Total weight of edges whose endpoints get different labels.
double cut_value(const WeightedGraph& g, const Assignment& a);

/// The same cut recovered from the Laplacian quadratic form: for K = 3 every
/// cut edge contributes 3w to Re(z^H Q z), so the factor is exactly 3.
double cut_from_form(const WeightedGraph& g, const Assignment& a);

} // namespace kcut
