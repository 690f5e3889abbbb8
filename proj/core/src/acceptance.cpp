#include "kcut/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "kcut/graph.hpp"
#include "kcut/graph_io.hpp"
#include "kcut/perturbation.hpp"
#include "kcut/pipeline.hpp"
#include "kcut/rank1.hpp"
#include "kcut/rankr.hpp"
#include "kcut/rng.hpp"
#include "kcut/spectra.hpp"

namespace kcut {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               t0)
      .count();
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

Eigen::MatrixXcd random_factor(int n, int r, Rng& rng) {
  Eigen::MatrixXcd V(n, r);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < r; ++j) {
      V(i, j) = Cplx(rng.normal(), rng.normal());
    }
  }
  return V;
}

HermitianOperand psd_from_factor(const Eigen::MatrixXcd& V) {
  Eigen::MatrixXcd Q = V * V.adjoint();
  Q = 0.5 * (Q + Q.adjoint().eval());
  return HermitianOperand(std::move(Q), 1e-9, /*psd_hint=*/true);
}

double rel_gap(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

template <typename Body>
CriterionResult run_criterion(int id, std::string name, Body&& body) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  const auto t0 = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.status = CriterionStatus::fail;
    r.detail = std::string("exception: ") + e.what();
  }
  r.wall_time_ms = ms_since(t0);
  return r;
}

/// Residual maxima carried from the rank-r exactness runs into the vertex
/// residual criterion.
struct SuiteState {
  double max_residual = 0.0;
  double max_norm_err = 0.0;
  std::int64_t rankr_runs = 0;
};

CriterionResult criterion_rank1(const AcceptanceOptions& opts) {
  return run_criterion(1, "rank-1 exactness vs oracle", [&](CriterionResult& r) {
    const int count = opts.quick ? 40 : 200;
    const int ns[] = {3, 4, 5, 6, 7, 8};
    const int ks[] = {2, 3, 4, 5};
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
      const int n = ns[i % 6];
      const int K = ks[(i / 6) % 4];
      Rng rng(101 + static_cast<std::uint64_t>(i));
      const HermitianOperand Q = psd_from_factor(random_factor(n, 1, rng));
      const SolveReport rep = approximate_low_rank(Q, 1, K);
      const OracleResult orc = brute_force_oracle(Q, K);
      const double gap = rel_gap(rep.objective, orc.objective);
      worst = std::max(worst, gap);
      if (gap > 1e-9) {
        r.detail = "instance " + std::to_string(i) + " (n=" +
                   std::to_string(n) + ", K=" + std::to_string(K) +
                   "): solver " + num(rep.objective) + " vs oracle " +
                   num(orc.objective);
        return;
      }
    }
    r.status = CriterionStatus::pass;
    r.detail = std::to_string(count) + " instances, worst relative gap " +
               num(worst);
  });
}

CriterionResult criterion_rankr(const AcceptanceOptions& opts,
                                SuiteState& state) {
  return run_criterion(2, "rank-r exactness vs oracle", [&](CriterionResult& r) {
    const int per_n2 = opts.quick ? 6 : 50;
    const int total3 = opts.quick ? 3 : 15;
    double worst = 0.0;
    std::int64_t runs = 0;

    auto check = [&](int n, int rr, std::uint64_t seed) -> bool {
      Rng rng(seed);
      const Eigen::MatrixXcd V0 = random_factor(n, rr, rng);
      const HermitianOperand Q = psd_from_factor(V0);
      const SpectralFactor f = top_r_factor(Q, rr);
      const RankRSolution sol = solve_rankr(Q, f.scaled_factor(), rr, 3);
      const OracleResult orc = brute_force_oracle(Q, 3);
      state.max_residual = std::max(state.max_residual, sol.max_vertex_residual);
      state.max_norm_err = std::max(state.max_norm_err, sol.max_unit_norm_error);
      ++runs;
      const double gap = rel_gap(sol.objective, orc.objective);
      worst = std::max(worst, gap);
      if (gap > 1e-9) {
        r.detail = "n=" + std::to_string(n) + " r=" + std::to_string(rr) +
                   " seed=" + std::to_string(seed) + ": solver " +
                   num(sol.objective) + " vs oracle " + num(orc.objective);
        return false;
      }
      return true;
    };

    for (int n = 3; n <= 6; ++n) {
      for (int i = 0; i < per_n2; ++i) {
        if (!check(n, 2, 2000 + static_cast<std::uint64_t>(100 * n + i))) return;
      }
    }
    for (int i = 0; i < total3; ++i) {
      const int n = 3 + (i % 3);
      if (!check(n, 3, 3000 + static_cast<std::uint64_t>(i))) return;
    }
    state.rankr_runs = runs;
    r.status = CriterionStatus::pass;
    r.detail = std::to_string(runs) + " instances, worst relative gap " +
               num(worst);
  });
}

CriterionResult criterion_residuals(const SuiteState& state) {
  return run_criterion(3, "vertex residuals and unit norms", [&](CriterionResult& r) {
    // Instrumented maxima from the exactness runs.
    if (state.rankr_runs == 0) {
      r.detail = "no rank-r runs recorded";
      return;
    }
    if (state.max_residual > 1e-8 || state.max_norm_err > 1e-12) {
      r.detail = "instrumented maxima: residual " + num(state.max_residual) +
                 ", norm error " + num(state.max_norm_err);
      return;
    }
    // Independent pass over fresh instances through the public stream.
    double max_res = 0.0, max_nrm = 0.0;
    std::int64_t accepted = 0;
    for (std::uint64_t seed : {9001u, 9002u, 9003u}) {
      Rng rng(seed);
      const int n = 4 + static_cast<int>(seed % 2);
      const Eigen::MatrixXcd V = random_factor(n, 2, rng);
      const AugmentedSystem sys = build_augmented(V, 3);
      IndexSetStream stream = stream_valid_index_sets(sys);
      std::vector<int> I;
      while (stream.next(I)) {
        const auto c = vertex_nullvector(sys, I);
        if (!c) continue;
        ++accepted;
        Eigen::VectorXd prod(I.size());
        for (std::size_t t = 0; t < I.size(); ++t) {
          prod(static_cast<int>(t)) = sys.rows.row(I[t]).dot(*c);
        }
        max_res = std::max(max_res, prod.cwiseAbs().maxCoeff());
        max_nrm = std::max(max_nrm, std::abs(c->norm() - 1.0));
      }
    }
    if (max_res > 1e-8 || max_nrm > 1e-12) {
      r.detail = "stream check: residual " + num(max_res) + ", norm error " +
                 num(max_nrm);
      return;
    }
    r.status = CriterionStatus::pass;
    r.detail = std::to_string(state.rankr_runs) + " runs + " +
               std::to_string(accepted) + " streamed vertices; residual <= " +
               num(std::max(state.max_residual, max_res)) + ", norm error <= " +
               num(std::max(state.max_norm_err, max_nrm));
  });
}

CriterionResult criterion_counts(const AcceptanceOptions&) {
  return run_criterion(4, "candidate-count scaling and bound", [&](CriterionResult& r) {
    const int ns[] = {4, 6, 8, 10};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::ostringstream seen;
    for (int n : ns) {
      Rng rng(400 + static_cast<std::uint64_t>(n));
      const Eigen::MatrixXcd V = random_factor(n, 2, rng);
      const RankRResult res = maximize_rankr(V, 3);
      const std::uint64_t bound = candidate_count_bound(n, 2, 3);
      if (static_cast<std::uint64_t>(res.candidates) > bound) {
        r.detail = "n=" + std::to_string(n) + ": count " +
                   std::to_string(res.candidates) + " exceeds bound " +
                   std::to_string(bound);
        return;
      }
      seen << " n=" << n << ":" << res.candidates << "/" << bound;
      const double x = std::log(static_cast<double>(n));
      const double y = std::log(static_cast<double>(res.candidates));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = 4.0;
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    if (slope < 2.5 || slope > 3.5) {
      r.detail = "log-log slope " + num(slope) + " outside 3 +- 0.5;" +
                 seen.str();
      return;
    }
    r.status = CriterionStatus::pass;
    r.detail = "slope " + num(slope) + ";" + seen.str();
  });
}

CriterionResult criterion_determinism(const AcceptanceOptions& opts) {
  return run_criterion(5, "worker-count determinism", [&](CriterionResult& r) {
    if (opts.quick) {
      r.status = CriterionStatus::skip;
      r.detail = "long run, full suite only";
      return;
    }
    const WeightedGraph g = generate_er(200, 0.05, 7);
    std::ostringstream detail;
    for (int rank : {1, 2}) {
      SolveReport base;
      for (int w : {1, 2, 8}) {
        ParallelConfig par;
        par.workers = w;
        const SolveReport rep = approximate_low_rank(g, rank, 3, par);
        if (w == 1) {
          base = rep;
          detail << "rank " << rank << ": objective " << num(rep.objective)
                 << ", candidates " << rep.candidates_evaluated << "; ";
          continue;
        }
        if (rep.objective != base.objective ||
            rep.assignment.labels != base.assignment.labels ||
            rep.candidates_evaluated != base.candidates_evaluated) {
          r.detail = "rank " + std::to_string(rank) + ", workers " +
                     std::to_string(w) + " diverged from workers 1";
          return;
        }
      }
    }
    r.status = CriterionStatus::pass;
    r.detail = detail.str() + "identical across workers {1,2,8}";
  });
}

CriterionResult criterion_cut_form(const AcceptanceOptions& opts) {
  return run_criterion(6, "cut equals form/3", [&](CriterionResult& r) {
    const int count = opts.quick ? 30 : 100;
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
      Rng rng(600 + static_cast<std::uint64_t>(i));
      const int n = 3 + static_cast<int>(rng.below(48));
      const double p = 0.1 + 0.8 * rng.uniform01();
      const WeightedGraph g =
          generate_er(n, p, 6000 + static_cast<std::uint64_t>(i));
      std::vector<int> labels(static_cast<std::size_t>(n));
      for (int v = 0; v < n; ++v) {
        labels[static_cast<std::size_t>(v)] = static_cast<int>(rng.below(3));
      }
      const Assignment a(labels, 3);
      const double direct = cut_value(g, a);
      const double via_form = cut_from_form(g, a);
      const double gap =
          std::abs(direct - via_form) / std::max(1.0, std::abs(direct));
      worst = std::max(worst, gap);
      if (gap > 1e-6) {
        r.detail = "pair " + std::to_string(i) + ": cut " + num(direct) +
                   " vs form/3 " + num(via_form);
        return;
      }
    }
    r.status = CriterionStatus::pass;
    r.detail = std::to_string(count) + " pairs, worst relative gap " +
               num(worst);
  });
}

CriterionResult criterion_gset(const AcceptanceOptions& opts) {
  return run_criterion(7, "GSet G48/G49/G50 cuts", [&](CriterionResult& r) {
    if (opts.quick) {
      r.status = CriterionStatus::skip;
      r.detail = "long run, full suite only";
      return;
    }
    namespace fs = std::filesystem;
    struct Target {
      const char* name;
      double want;
      bool exact;
    };
    const Target targets[] = {
        {"G48", 6000.0, true}, {"G49", 6000.0, true}, {"G50", 5900.0, false}};
    std::ostringstream detail;
    int present = 0;
    for (const auto& t : targets) {
      const fs::path path = fs::path(opts.gset_dir) / t.name;
      if (!fs::exists(path)) continue;
      ++present;
      const WeightedGraph g = parse_gset_file(path.string());
      ParallelConfig par;
      par.workers = 8;
      const SolveReport rep = approximate_low_rank(
          g, 1, 3, par, Deadline::after(std::chrono::minutes(10)));
      const double cut = rep.cut_value.value_or(0.0);
      const bool ok = t.exact ? cut == t.want : cut >= t.want;
      detail << t.name << ": cut " << num(cut) << (ok ? " ok" : " BAD") << "; ";
      if (!ok) {
        r.detail = detail.str();
        return;
      }
    }
    if (present == 0) {
      r.status = CriterionStatus::skip;
      r.detail = "no GSet files under " + opts.gset_dir;
      return;
    }
    r.status = CriterionStatus::pass;
    r.detail = detail.str() + std::to_string(present) + " file(s) checked";
  });
}

CriterionResult criterion_torus(const AcceptanceOptions& opts) {
  return run_criterion(8, "toroidal rank-1 proxy", [&](CriterionResult& r) {
    const WeightedGraph g = generate_torus(30, 30);
    const double edges = static_cast<double>(g.m());
    const int seeds = opts.quick ? 4 : 10;
    const int need = opts.quick ? 3 : 8;
    int ok = 0;
    double worst = 1.0;
    for (int s = 1; s <= seeds; ++s) {
      FactorOptions fo;
      fo.force_iterative = true;
      fo.start_seed = static_cast<std::uint64_t>(s);
      const SolveReport rep = approximate_low_rank(g, 1, 3, {}, {}, fo);
      const double frac = rep.cut_value.value_or(0.0) / edges;
      worst = std::min(worst, frac);
      if (frac >= 0.98) ++ok;
    }
    if (ok < need) {
      r.detail = std::to_string(ok) + "/" + std::to_string(seeds) +
                 " seeds reached 0.98|E|, worst fraction " + num(worst);
      return;
    }
    r.status = CriterionStatus::pass;
    r.detail = std::to_string(ok) + "/" + std::to_string(seeds) +
               " seeds >= 0.98|E| (worst fraction " + num(worst) + ")";
  });
}

CriterionResult criterion_pipeline_sanity(const AcceptanceOptions& opts) {
  return run_criterion(9, "approximate pipeline sanity", [&](CriterionResult& r) {
    const int reps = opts.quick ? 1 : 3;
    double worst = 0.0;
    for (int rr : {1, 2}) {
      for (int n : {4, 5, 6}) {
        for (int i = 0; i < reps; ++i) {
          Rng rng(900 + static_cast<std::uint64_t>(100 * rr + 10 * n + i));
          const HermitianOperand Q = psd_from_factor(random_factor(n, rr, rng));
          const SolveReport rep = approximate_low_rank(Q, rr, 3);
          const OracleResult orc = brute_force_oracle(Q, 3);
          const double gap = rel_gap(rep.objective, orc.objective);
          worst = std::max(worst, gap);
          if (gap > 1e-9) {
            r.detail = "rank " + std::to_string(rr) + ", n=" +
                       std::to_string(n) + ": pipeline " + num(rep.objective) +
                       " vs oracle " + num(orc.objective);
            return;
          }
        }
      }
    }
    // Degenerate noise: the additive-bound left side must vanish exactly.
    const int zero_seeds = opts.quick ? 2 : 5;
    for (int s = 1; s <= zero_seeds; ++s) {
      const PerturbationInstance inst = make_perturbation(
          5, 2, {3.0, 1.0}, 0.0, false, 950 + static_cast<std::uint64_t>(s));
      const AdditiveDiagnostic d = check_additive_bound(inst, 2, 3);
      if (d.lhs != 0.0) {
        r.detail = "zero-noise seed " + std::to_string(s) +
                   ": LHS = " + num(d.lhs) + " (expected exactly 0)";
        return;
      }
    }
    r.status = CriterionStatus::pass;
    r.detail = "matched oracle (worst gap " + num(worst) +
               "), zero-noise LHS exactly 0 on " + std::to_string(zero_seeds) +
               " seeds";
  });
}

CriterionResult criterion_additive(const AcceptanceOptions& opts) {
  return run_criterion(10, "additive-bound implied constant", [&](CriterionResult& r) {
    const int count = opts.quick ? 8 : 30;
    double worst = 0.0;
    int used = 0;
    for (int i = 0; i < count; ++i) {
      const int n = 5 + (i % 3);
      const int rr = (i % 3 == 0) ? 1 : 2;
      const bool herm = (i % 2) == 1;
      const std::vector<double> spectrum =
          (i % 4 < 2) ? std::vector<double>{3.0, 1.0}
                      : std::vector<double>{4.0, 1.5};
      const PerturbationInstance inst = make_perturbation(
          n, 2, spectrum, 0.03, herm, 1000 + static_cast<std::uint64_t>(i));
      const AdditiveDiagnostic d = check_additive_bound(inst, rr, 3);
      if (!d.precondition_ok) {
        r.detail = "seed " + std::to_string(1000 + i) +
                   ": precondition ||H|| <= delta*/2 violated (||H|| = " +
                   num(d.h_norm) + ")";
        return;
      }
      ++used;
      worst = std::max(worst, d.implied_constant);
      if (d.implied_constant > 10.0) {
        r.detail = "seed " + std::to_string(1000 + i) +
                   ": implied constant " + num(d.implied_constant);
        return;
      }
    }
    r.status = CriterionStatus::pass;
    r.detail = std::to_string(used) + " instances, max implied constant " +
               num(worst);
  });
}

CriterionResult criterion_noise_norm(const AcceptanceOptions& opts) {
  return run_criterion(11, "Gaussian noise norm ceiling", [&](CriterionResult& r) {
    const int seeds = opts.quick ? 10 : 50;
    const int n = 200;
    const double eps = 0.1;
    const double ceiling = 10.0 * eps * std::sqrt(static_cast<double>(n));
    double worst = 0.0;
    for (int s = 1; s <= seeds; ++s) {
      const PerturbationInstance inst = make_perturbation(
          n, 1, {1.0}, eps, false, 1100 + static_cast<std::uint64_t>(s));
      const double norm = operator_norm(inst.H);
      worst = std::max(worst, norm);
      if (norm > ceiling) {
        r.detail = "seed " + std::to_string(1100 + s) + ": ||H||_2 = " +
                   num(norm) + " > " + num(ceiling);
        return;
      }
    }
    r.status = CriterionStatus::pass;
    r.detail = std::to_string(seeds) + " draws, max ||H||_2 " + num(worst) +
               " <= " + num(ceiling);
  });
}

CriterionResult criterion_baselines(const AcceptanceOptions& opts) {
  return run_criterion(12, "baseline contracts", [&](CriterionResult& r) {
    for (int n : {5, 12}) {
      const WeightedGraph g =
          generate_er(n, 0.4, 1200 + static_cast<std::uint64_t>(n));
      const SolveReport rep = random_baseline(g, 3, 11);
      if (rep.candidates_evaluated != n + 1) {
        r.detail = "random baseline evaluated " +
                   std::to_string(rep.candidates_evaluated) + " != n+1";
        return;
      }
    }
    const WeightedGraph tri = make_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
    const WeightedGraph star = make_graph(
        5, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {0, 4, 1.0}});
    const double tri_cut = greedy_baseline(tri, 3).cut_value.value_or(-1.0);
    const double star_cut = greedy_baseline(star, 3).cut_value.value_or(-1.0);
    if (tri_cut != 3.0 || star_cut != 4.0) {
      r.detail = "greedy cuts: triangle " + num(tri_cut) + " (want 3), star " +
                 num(star_cut) + " (want 4)";
      return;
    }
    const int dominance = opts.quick ? 4 : 10;
    for (int i = 0; i < dominance; ++i) {
      const int n = 4 + (i % 5);
      const WeightedGraph g =
          generate_er(n, 0.5, 1250 + static_cast<std::uint64_t>(i));
      const OracleResult orc = brute_force_oracle(Laplacian(g).dense_operand(), 3);
      const double rnd = random_baseline(g, 3, 21 + static_cast<std::uint64_t>(i))
                             .objective;
      const double grd = greedy_baseline(g, 3).objective;
      if (rnd > orc.objective + 1e-9 || grd > orc.objective + 1e-9) {
        r.detail = "baseline exceeded oracle on instance " + std::to_string(i);
        return;
      }
    }
    r.status = CriterionStatus::pass;
    r.detail = "candidates n+1, greedy triangle 3 and star 4, oracle dominance held";
  });
}

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  std::vector<CriterionResult> results;
  SuiteState state;

  results.push_back(criterion_rank1(opts));
  results.push_back(criterion_rankr(opts, state));
  results.push_back(criterion_residuals(state));
  results.push_back(criterion_counts(opts));
  results.push_back(criterion_determinism(opts));
  results.push_back(criterion_cut_form(opts));
  results.push_back(criterion_gset(opts));
  results.push_back(criterion_torus(opts));
  results.push_back(criterion_pipeline_sanity(opts));
  results.push_back(criterion_additive(opts));
  results.push_back(criterion_noise_norm(opts));
  results.push_back(criterion_baselines(opts));

  std::int64_t total = 0;
  for (const auto& r : results) total += r.wall_time_ms;
  CriterionResult meta;
  meta.id = 13;
  meta.name = "runtime budget";
  const std::int64_t budget = opts.quick ? 60'000 : 900'000;
  meta.status = total <= budget ? CriterionStatus::pass : CriterionStatus::fail;
  meta.detail = "suite took " + std::to_string(total) + " ms (budget " +
                std::to_string(budget) + " ms, " +
                (opts.quick ? "quick" : "full") + ")";
  meta.wall_time_ms = 0;
  results.push_back(meta);
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const auto& r : results) {
    if (r.status == CriterionStatus::fail) return false;
  }
  return true;
}

const char* to_string(CriterionStatus s) {
  switch (s) {
    case CriterionStatus::pass:
      return "PASS";
    case CriterionStatus::fail:
      return "FAIL";
    case CriterionStatus::skip:
      return "SKIP";
  }
  return "FAIL";
}

} // namespace kcut
