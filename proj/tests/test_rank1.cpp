#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "kcut/rank1.hpp"
#include "kcut/rng.hpp"

using namespace kcut;
using std::numbers::pi;

namespace {

Eigen::VectorXcd random_unit(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXcd q(n);
  for (int i = 0; i < n; ++i) q(i) = Cplx(rng.normal(), rng.normal());
  q /= q.norm();
  return q;
}

HermitianOperand rank1_psd(const Eigen::VectorXcd& q, double lambda) {
  Eigen::MatrixXcd Q = lambda * q * q.adjoint();
  Q = (Q + Q.adjoint()) / 2.0;
  return HermitianOperand(std::move(Q), 1e-9, true);
}

double exhaustive_max(const HermitianOperand& Q, int K) {
  const int n = Q.n();
  std::vector<int> labels(n, 0);
  double best = -1e300;
  while (true) {
    best = std::max(best, quadratic_form(Q, Assignment(labels, K)));
    int i = n - 1;
    while (i >= 0 && ++labels[i] == K) labels[i--] = 0;
    if (i < 0) break;
  }
  return best;
}

} // namespace

TEST_CASE("schedule at the cardinal phases of K = 3") {
  Eigen::VectorXcd q(3);
  q << Cplx(1, 0), Cplx(-1, 0), std::polar(1.0, pi / 3);
  const BoundarySchedule s = boundary_schedule(q, 3);

  CHECK(s.theta[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(s.phi[0] == doctest::Approx(pi / 3).epsilon(1e-12));
  CHECK(s.k0[0] == 0);

  CHECK(s.theta[1] == doctest::Approx(pi).epsilon(1e-12));
  CHECK(std::abs(s.phi[1]) <= 1e-12);
  CHECK(s.k0[1] == 1);

  CHECK(std::abs(s.phi[2]) <= 1e-12);
  CHECK(s.k0[2] == 0);
}

TEST_CASE("schedule invariants on random inputs") {
  for (int K : {2, 3, 4, 5}) {
    const Eigen::VectorXcd q = random_unit(40, 500 + K);
    const BoundarySchedule s = boundary_schedule(q, K);
    REQUIRE(s.n() == 40);
    for (int i = 0; i < s.n(); ++i) {
      CHECK(s.theta[i] >= 0.0);
      CHECK(s.theta[i] < 2 * pi);
      CHECK(s.phi[i] > -pi / K - 1e-12);
      CHECK(s.phi[i] <= pi / K + 1e-12);
      CHECK(s.k0[i] >= 0);
      CHECK(s.k0[i] < K);
    }
    for (int t = 0; t + 1 < s.n(); ++t) {
      const int a = s.order[t], b = s.order[t + 1];
      CHECK((s.phi[a] < s.phi[b] || (s.phi[a] == s.phi[b] && a < b)));
    }
  }
}

TEST_CASE("zero coordinates take the zero-phase convention") {
  Eigen::VectorXcd q(2);
  q << Cplx(0, 0), Cplx(2, 0);
  const BoundarySchedule s = boundary_schedule(q, 3);
  CHECK(s.theta[0] == 0.0);
  CHECK(s.k0[0] == 0);
  CHECK(s.phi[0] == doctest::Approx(pi / 3).epsilon(1e-12));
}

TEST_CASE("ties on equal phi break by coordinate index") {
  Eigen::VectorXcd q(3);
  q << Cplx(1, 0), Cplx(-1, 0), Cplx(1, 0); // phi = (pi/3, 0, pi/3)
  const BoundarySchedule s = boundary_schedule(q, 3);
  CHECK(s.order == std::vector<int>{1, 0, 2});
}

TEST_CASE("candidate stream emits n + 1 single-step changes") {
  const Eigen::VectorXcd q = random_unit(3, 61);
  const BoundarySchedule s = boundary_schedule(q, 3);
  std::vector<std::vector<int>> seen;
  enumerate_rank1_candidates(s, [&](std::int64_t t, const std::vector<int>& l) {
    CHECK(static_cast<std::int64_t>(seen.size()) == t);
    seen.push_back(l);
    return true;
  });
  REQUIRE(seen.size() == 4);
  for (int i = 0; i < 3; ++i) CHECK(seen[0][i] == s.k0[i]);
  for (size_t t = 1; t < seen.size(); ++t) {
    int changed = 0;
    for (int i = 0; i < 3; ++i) {
      if (seen[t][i] != seen[t - 1][i]) {
        ++changed;
        CHECK(seen[t][i] == (seen[t - 1][i] + 1) % 3);
        CHECK(i == s.order[t - 1]);
      }
    }
    CHECK(changed == 1);
  }
}

TEST_CASE("all-ones target starts from the all-zeros labeling") {
  Eigen::VectorXcd q = Eigen::VectorXcd::Ones(5);
  const BoundarySchedule s = boundary_schedule(q, 3);
  bool first = true;
  enumerate_rank1_candidates(s, [&](std::int64_t, const std::vector<int>& l) {
    if (first) {
      for (int v : l) CHECK(v == 0);
      first = false;
    }
    return true;
  });
  CHECK(!first);
}

TEST_CASE("single coordinate yields two candidates") {
  Eigen::VectorXcd q(1);
  q << Cplx(0.3, 0.4);
  const Rank1Result res = maximize_rank1(q, 4);
  CHECK(res.candidates == 2);
}

TEST_CASE("constant target is solved by a constant assignment") {
  const int n = 6;
  const double lambda = 2.5;
  Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(n) / std::sqrt(double(n));
  const HermitianOperand Q = rank1_psd(ones, lambda * n); // lambda * 11^H
  const Rank1Solution sol = solve_rank1(Q, ones, 3);
  for (int v : sol.assignment.labels) CHECK(v == 0);
  CHECK(sol.objective == doctest::Approx(lambda * n * n).epsilon(1e-10));
  CHECK(sol.candidates == n + 1);
}

TEST_CASE("rank-one solve matches the exhaustive reference") {
  const int n = 5;
  const Eigen::VectorXcd q = random_unit(n, 42);
  const HermitianOperand Q = rank1_psd(q, 1.7);
  const Rank1Solution sol = solve_rank1(Q, q, 3);
  const double best = exhaustive_max(Q, 3);
  CHECK(std::abs(sol.objective - best) <= 1e-9 * std::max(1.0, best));
  CHECK(sol.candidates == n + 1);

  for (int K : {2, 4, 5}) {
    const Rank1Solution s = solve_rank1(Q, q, K);
    const double want = exhaustive_max(Q, K);
    CHECK(std::abs(s.objective - want) <= 1e-9 * std::max(1.0, want));
  }
}

TEST_CASE("real targets at K = 2 recover the sign pattern") {
  Eigen::VectorXcd q(4);
  q << Cplx(2, 0), Cplx(-1, 0), Cplx(3, 0), Cplx(-0.5, 0);
  const HermitianOperand Q = rank1_psd(q / q.norm(), 3.0);
  const Rank1Solution sol = solve_rank1(Q, q, 2);
  CHECK(sol.assignment.labels == std::vector<int>{0, 1, 0, 1});
}

TEST_CASE("phase rotation and positive scaling do not move the winner") {
  const Eigen::VectorXcd q = random_unit(7, 99);
  const HermitianOperand Q = rank1_psd(q, 2.0);
  const Rank1Solution base = solve_rank1(Q, q, 3);

  for (double alpha : {0.4, 1.9, 3.6}) {
    const Eigen::VectorXcd rotated = std::polar(1.0, alpha) * q;
    const Rank1Solution sol = solve_rank1(Q, rotated, 3);
    CHECK(sol.objective ==
          doctest::Approx(base.objective).epsilon(1e-9));
  }
  const Rank1Solution scaled = solve_rank1(Q, 3.0 * q, 3);
  CHECK(scaled.assignment.labels == base.assignment.labels);
  CHECK(scaled.objective == doctest::Approx(base.objective).epsilon(1e-12));
}

TEST_CASE("worker count never changes the rank-one result") {
  const Eigen::VectorXcd q = random_unit(100, 123);
  ParallelConfig one, two, eight;
  one.workers = 1;
  two.workers = 2;
  eight.workers = 8;
  const Rank1Result a = maximize_rank1(q, 3, one);
  const Rank1Result b = maximize_rank1(q, 3, two);
  const Rank1Result c = maximize_rank1(q, 3, eight);
  CHECK(a.factor_objective == b.factor_objective);
  CHECK(a.factor_objective == c.factor_objective);
  CHECK(a.assignment.labels == b.assignment.labels);
  CHECK(a.assignment.labels == c.assignment.labels);
  CHECK(a.candidates == b.candidates);
  CHECK(a.candidates == c.candidates);
}

TEST_CASE("expired deadline flags the result and keeps a candidate") {
  const Eigen::VectorXcd q = random_unit(50, 7);
  const Deadline past = Deadline::after(std::chrono::seconds(-1));
  const Rank1Result res = maximize_rank1(q, 3, {}, past);
  CHECK(res.timed_out);
}
