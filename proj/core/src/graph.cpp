#include "kcut/graph.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "kcut/rng.hpp"

namespace kcut {

namespace {

std::uint64_t pair_key(int u, int v, int n) {
  return static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(n) +
         static_cast<std::uint64_t>(v);
}

} // namespace

WeightedGraph make_graph(int n, std::vector<WeightedGraph::Edge> edges) {
  if (n < 1) {
    throw std::invalid_argument("graph requires n >= 1");
  }
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges.size() * 2);
  for (auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.u == e.v) {
      throw std::invalid_argument("self-loops are not allowed");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
    if (!seen.insert(pair_key(e.u, e.v, n)).second) {
      throw std::invalid_argument("duplicate edge");
    }
  }
  WeightedGraph g;
  g.n = n;
  g.edges = std::move(edges);
  return g;
}

WeightedGraph generate_er(int n, double p, std::uint64_t seed) {
  if (n < 1) {
    throw std::invalid_argument("generate_er requires n >= 1");
  }
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw std::invalid_argument("generate_er requires p in [0, 1]");
  }
  WeightedGraph g;
  g.n = n;
  const std::uint64_t total =
      static_cast<std::uint64_t>(n) * (static_cast<std::uint64_t>(n) - 1) / 2;
  if (p <= 0.0 || total == 0) {
    return g;
  }
  auto unrank = [n](std::uint64_t t) {
    // Pair index t enumerates (0,1), (0,2), ..., (0,n-1), (1,2), ... in order.
    std::uint64_t row_len = static_cast<std::uint64_t>(n) - 1;
    int u = 0;
    while (t >= row_len) {
      t -= row_len;
      --row_len;
      ++u;
    }
    return WeightedGraph::Edge{u, u + 1 + static_cast<int>(t), 1.0};
  };
  Rng rng(seed);
  if (p >= 1.0) {
    for (std::uint64_t t = 0; t < total; ++t) g.edges.push_back(unrank(t));
    return g;
  }
  // Geometric skipping: the gap to the next included pair is
  // floor(log(u)/log(1-p)), visiting only included pairs.
  const double log1mp = std::log1p(-p);
  std::uint64_t t = 0;
  while (true) {
    double u;
    do {
      u = rng.uniform01();
    } while (u <= 0.0);
    const double skip = std::floor(std::log(u) / log1mp);
    if (skip >= static_cast<double>(total - t)) break;
    t += static_cast<std::uint64_t>(skip);
    g.edges.push_back(unrank(t));
    if (++t >= total) break;
  }
  return g;
}

WeightedGraph generate_regular(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 0) {
    throw std::invalid_argument("generate_regular requires n >= 1, d >= 0");
  }
  if (d >= n) {
    throw std::invalid_argument("generate_regular requires d < n");
  }
  if ((static_cast<std::int64_t>(n) * d) % 2 != 0) {
    throw std::invalid_argument("generate_regular requires n*d even");
  }
  WeightedGraph g;
  g.n = n;
  if (d == 0) return g;

  Rng rng(seed);
  int budget = 100; // full restarts + stalled repair rounds share this budget
  while (budget > 0) {
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * d);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < d; ++k) stubs.push_back(i);
    }
    std::unordered_set<std::uint64_t> seen;
    std::vector<WeightedGraph::Edge> edges;
    edges.reserve(stubs.size() / 2);
    bool restart = false;
    while (!stubs.empty()) {
      rng.shuffle(stubs.begin(), stubs.end());
      std::vector<int> rejected;
      for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
        int u = stubs[i], v = stubs[i + 1];
        if (u > v) std::swap(u, v);
        if (u == v || seen.count(pair_key(u, v, n))) {
          rejected.push_back(stubs[i]);
          rejected.push_back(stubs[i + 1]);
          continue;
        }
        seen.insert(pair_key(u, v, n));
        edges.push_back({u, v, 1.0});
      }
      if (rejected.size() == stubs.size()) {
        // No progress: the leftover stubs cannot be paired (e.g. all one
        // node, or every cross pair already present). Start over.
        restart = true;
        --budget;
        break;
      }
      stubs = std::move(rejected);
    }
    if (!restart) {
      g.edges = std::move(edges);
      return g;
    }
  }
  throw std::runtime_error(
      "generate_regular failed to produce a simple graph within 100 attempts");
}

WeightedGraph generate_torus(int rows, int cols) {
  if (rows < 3 || cols < 3) {
    throw std::invalid_argument("generate_torus requires rows, cols >= 3");
  }
  WeightedGraph g;
  g.n = rows * cols;
  g.edges.reserve(static_cast<std::size_t>(2) * rows * cols);
  auto id = [cols](int i, int j) { return i * cols + j; };
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      int a = id(i, j), r = id(i, (j + 1) % cols), dn = id((i + 1) % rows, j);
      g.edges.push_back({std::min(a, r), std::max(a, r), 1.0});
      g.edges.push_back({std::min(a, dn), std::max(a, dn), 1.0});
    }
  }
  return g;
}

Laplacian::Laplacian(const WeightedGraph& g) : n_(g.n), deg_(g.n) {
  deg_.setZero();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(g.edges.size() * 2 + static_cast<std::size_t>(g.n));
  for (const auto& e : g.edges) {
    deg_(e.u) += e.w;
    deg_(e.v) += e.w;
    trips.emplace_back(e.u, e.v, -e.w);
    trips.emplace_back(e.v, e.u, -e.w);
  }
  for (int i = 0; i < n_; ++i) {
    trips.emplace_back(i, i, deg_(i));
  }
  mat_.resize(n_, n_);
  mat_.setFromTriplets(trips.begin(), trips.end());
}

Eigen::MatrixXd Laplacian::dense() const {
  if (n_ > dense_threshold()) {
    throw std::length_error("Laplacian too large for a dense mirror");
  }
  return Eigen::MatrixXd(mat_);
}

HermitianOperand Laplacian::dense_operand() const {
  return HermitianOperand(dense().cast<Cplx>(), 1e-9, /*psd_hint=*/true);
}

Eigen::MatrixXd Laplacian::apply(const Eigen::MatrixXd& x) const {
  return mat_ * x;
}

double Laplacian::quadratic_form_of(const Assignment& a) const {
  if (a.size() != n_) {
    throw std::invalid_argument("assignment dimension does not match Laplacian");
  }
  const Eigen::VectorXcd z = a.symbols();
  const Eigen::VectorXd re = z.real(), im = z.imag();
  return re.dot(mat_ * re) + im.dot(mat_ * im);
}

double cut_value(const WeightedGraph& g, const Assignment& a) {
  if (a.size() != g.n) {
    throw std::invalid_argument("assignment dimension does not match graph");
  }
  double cut = 0.0;
  for (const auto& e : g.edges) {
    if (a.labels[e.u] != a.labels[e.v]) cut += e.w;
  }
  return cut;
}

double cut_from_form(const WeightedGraph& g, const Assignment& a) {
  return Laplacian(g).quadratic_form_of(a) / 3.0;
}

} // namespace kcut
