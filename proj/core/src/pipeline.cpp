#include "kcut/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "kcut/rankr.hpp"
#include "kcut/rng.hpp"

namespace kcut {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               t0)
      .count();
}

std::vector<int> canonical_labels(std::vector<int> labels, int K) {
  if (labels.empty() || labels[0] == 0) return labels;
  const int shift = K - labels[0];
  for (auto& l : labels) l = (l + shift) % K;
  return labels;
}

} // namespace

SolveReport approximate_low_rank(const HermitianOperand& Q, int r, int K,
                                 const ParallelConfig& par,
                                 const Deadline& deadline) {
  const auto t0 = Clock::now();
  if (r < 1 || r > Q.n()) {
    throw std::invalid_argument("rank must satisfy 1 <= r <= n");
  }
  const SpectralFactor f = top_r_factor(Q, r);
  const Eigen::MatrixXcd V = f.scaled_factor();
  const RankRResult res = maximize_rankr(V, K, par, deadline);

  SolveReport rep;
  rep.algorithm = "approx";
  rep.rank = r;
  rep.K = K;
  rep.n = Q.n();
  rep.assignment = res.assignment;
  rep.objective = quadratic_form(Q, res.assignment);
  rep.candidates_evaluated = res.candidates;
  rep.workers = par.workers;
  rep.timed_out = res.timed_out;
  rep.wall_time_ms = ms_since(t0);
  return rep;
}

SolveReport approximate_low_rank(const WeightedGraph& g, int r, int K,
                                 const ParallelConfig& par,
                                 const Deadline& deadline,
                                 const FactorOptions& fopts) {
  const auto t0 = Clock::now();
  const Laplacian L(g);
  if (r < 1 || r > L.n()) {
    throw std::invalid_argument("rank must satisfy 1 <= r <= n");
  }
  const SpectralFactor f = top_r_factor(L, r, fopts);
  const Eigen::MatrixXcd V = f.scaled_factor();
  const RankRResult res = maximize_rankr(V, K, par, deadline);

  SolveReport rep;
  rep.algorithm = "approx";
  rep.rank = r;
  rep.K = K;
  rep.n = g.n;
  rep.m = g.m();
  rep.assignment = res.assignment;
  rep.objective = L.quadratic_form_of(res.assignment);
  if (K == 3) rep.cut_value = cut_value(g, res.assignment);
  rep.candidates_evaluated = res.candidates;
  rep.workers = par.workers;
  rep.timed_out = res.timed_out;
  rep.wall_time_ms = ms_since(t0);
  return rep;
}

OracleResult brute_force_oracle(const HermitianOperand& Q, int K) {
  const int n = Q.n();
  if (n < 1) throw std::invalid_argument("oracle requires n >= 1");
  const Alphabet alphabet = make_alphabet(K);

  std::int64_t total = 1;
  for (int i = 1; i < n; ++i) {
    if (total > kOracleCap / K) {
      throw std::length_error(
          "oracle refuses the instance: K^(n-1) exceeds 10^7 assignments");
    }
    total *= K;
  }

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  Eigen::VectorXcd z = Eigen::VectorXcd::Ones(n);
  Eigen::VectorXcd y = Q.entries * z;
  double best_obj = z.dot(y).real();
  std::vector<int> best_labels = labels;

  // Lexicographic odometer over labels[1..n-1] with an incrementally
  // maintained y = Q z, refreshed from scratch periodically so roundoff
  // cannot accumulate across millions of steps.
  std::int64_t since_refresh = 0;
  for (std::int64_t step = 1; step < total; ++step) {
    int p = n - 1;
    while (true) {
      const int next = labels[static_cast<std::size_t>(p)] + 1;
      const int l = next == K ? 0 : next;
      labels[static_cast<std::size_t>(p)] = l;
      const Cplx znew = alphabet.roots[static_cast<std::size_t>(l)];
      y.noalias() += Q.entries.col(p) * (znew - z(p));
      z(p) = znew;
      if (l != 0) break;
      --p; // carry; p >= 1 because step < total
    }
    if (++since_refresh >= 4096) {
      since_refresh = 0;
      y.noalias() = Q.entries * z;
    }
    const double obj = z.dot(y).real();
    if (obj > best_obj) {
      best_obj = obj;
      best_labels = labels;
    }
  }

  OracleResult out;
  out.assignment = Assignment(std::move(best_labels), K);
  out.objective = quadratic_form(Q, out.assignment);
  out.evaluated = total;
  return out;
}

SolveReport random_baseline(const WeightedGraph& g, int K,
                            std::uint64_t seed) {
  const auto t0 = Clock::now();
  make_alphabet(K); // validates K
  Rng rng(seed);

  const int n = g.n;
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  bool have = false;
  double best_cut = 0.0;
  std::vector<int> best_canon;
  for (int t = 0; t < n + 1; ++t) {
    for (int i = 0; i < n; ++i) {
      labels[static_cast<std::size_t>(i)] =
          static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
    }
    const Assignment a(labels, K);
    const double cut = cut_value(g, a);
    auto canon = canonical_labels(labels, K);
    if (!have || cut > best_cut || (cut == best_cut && canon < best_canon)) {
      have = true;
      best_cut = cut;
      best_canon = std::move(canon);
    }
  }

  SolveReport rep;
  rep.algorithm = "random";
  rep.rank = 0;
  rep.K = K;
  rep.n = n;
  rep.m = g.m();
  rep.assignment = Assignment(std::move(best_canon), K);
  rep.objective = Laplacian(g).quadratic_form_of(rep.assignment);
  if (K == 3) rep.cut_value = best_cut;
  rep.candidates_evaluated = n + 1;
  rep.seed = seed;
  rep.wall_time_ms = ms_since(t0);
  return rep;
}

SolveReport greedy_baseline(const WeightedGraph& g, int K,
                            const Deadline& deadline) {
  const auto t0 = Clock::now();
  make_alphabet(K); // validates K
  const int n = g.n;

  std::vector<std::vector<std::pair<int, double>>> adj(
      static_cast<std::size_t>(n));
  std::vector<double> wdeg(static_cast<std::size_t>(n), 0.0);
  for (const auto& e : g.edges) {
    adj[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.w);
    adj[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.w);
    wdeg[static_cast<std::size_t>(e.u)] += e.w;
    wdeg[static_cast<std::size_t>(e.v)] += e.w;
  }

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<bool> locked(static_cast<std::size_t>(n), false);
  // Per unlocked node: total locked-neighbor weight and its split by the
  // neighbors' labels; gain(v, l) = locked_total[v] - locked_by_label[v*K+l].
  std::vector<double> locked_total(static_cast<std::size_t>(n), 0.0);
  std::vector<double> locked_by_label(static_cast<std::size_t>(n) * K, 0.0);
  bool timed_out = false;

  auto lock = [&](int v, int l) {
    locked[static_cast<std::size_t>(v)] = true;
    labels[static_cast<std::size_t>(v)] = l;
    for (const auto& [u, w] : adj[static_cast<std::size_t>(v)]) {
      if (locked[static_cast<std::size_t>(u)]) continue;
      locked_total[static_cast<std::size_t>(u)] += w;
      locked_by_label[static_cast<std::size_t>(u) * K + l] += w;
    }
  };

  if (n > 0) {
    int first = 0;
    for (int v = 1; v < n; ++v) {
      if (wdeg[static_cast<std::size_t>(v)] > wdeg[static_cast<std::size_t>(first)]) {
        first = v;
      }
    }
    lock(first, 0);
    for (int step = 1; step < n; ++step) {
      if (deadline.expired()) {
        timed_out = true;
        break;
      }
      int bv = -1, bl = 0;
      double bg = 0.0;
      for (int v = 0; v < n; ++v) {
        if (locked[static_cast<std::size_t>(v)]) continue;
        for (int l = 0; l < K; ++l) {
          const double gain =
              locked_total[static_cast<std::size_t>(v)] -
              locked_by_label[static_cast<std::size_t>(v) * K + l];
          if (bv < 0 || gain > bg) {
            bv = v;
            bl = l;
            bg = gain;
          }
        }
      }
      lock(bv, bl);
    }
  }

  SolveReport rep;
  rep.algorithm = "greedy";
  rep.rank = 0;
  rep.K = K;
  rep.n = n;
  rep.m = g.m();
  rep.assignment = Assignment(canonical_labels(labels, K), K);
  rep.objective = Laplacian(g).quadratic_form_of(rep.assignment);
  if (K == 3) rep.cut_value = cut_value(g, rep.assignment);
  rep.candidates_evaluated = n;
  rep.timed_out = timed_out;
  rep.wall_time_ms = ms_since(t0);
  return rep;
}

} // namespace kcut
