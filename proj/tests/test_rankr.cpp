#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "kcut/graph.hpp"
#include "kcut/rank1.hpp"
#include "kcut/rankr.hpp"
#include "kcut/rng.hpp"
#include "kcut/spectra.hpp"

using namespace kcut;
using std::numbers::pi;

namespace {

Eigen::MatrixXcd random_complex(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXcd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      m(i, j) = Cplx(rng.normal(), rng.normal());
    }
  }
  return m;
}

HermitianOperand psd_of(const Eigen::MatrixXcd& V) {
  Eigen::MatrixXcd Q = V * V.adjoint();
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

std::vector<std::vector<int>> label_sets(const std::vector<Assignment>& all) {
  std::vector<std::vector<int>> out;
  for (const auto& a : all) out.push_back(a.labels);
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST_CASE("augmented system shapes follow the parity of K") {
  const Eigen::MatrixXcd V21 = random_complex(2, 1, 1);
  const AugmentedSystem s3 = build_augmented(V21, 3);
  CHECK(s3.rows.rows() == 6);
  CHECK(s3.rows.cols() == 2);
  CHECK(s3.b_k == 3);

  const Eigen::MatrixXcd V32 = random_complex(3, 2, 2);
  const AugmentedSystem s2 = build_augmented(V32, 2);
  CHECK(s2.rows.rows() == 3);
  CHECK(s2.rows.cols() == 4);
  CHECK(s2.b_k == 1);

  const AugmentedSystem s4 = build_augmented(V32, 4);
  CHECK(s4.rows.rows() == 6);
  CHECK(s4.b_k == 2);
}

TEST_CASE("augmented rows are the rotated real and imaginary parts") {
  const Eigen::MatrixXcd V = random_complex(3, 2, 5);
  const AugmentedSystem sys = build_augmented(V, 3);
  for (int m = 0; m < sys.b_k; ++m) {
    const Cplx rho = std::polar(1.0, -pi * (2 * m + 1) / 3);
    CHECK(std::abs(rho - sys.rotations[m]) < 1e-15);
    for (int i = 0; i < 3; ++i) {
      const int j = m * 3 + i;
      CHECK(sys.group_of_row(j) == i);
      for (int col = 0; col < 2; ++col) {
        const Cplx rotated = rho * V(i, col);
        CHECK(sys.rows(j, col) == doctest::Approx(rotated.real()).epsilon(1e-14));
        CHECK(sys.rows(j, col + 2) ==
              doctest::Approx(rotated.imag()).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("half pairing of the real null vector") {
  Eigen::VectorXd c_tilde(4);
  c_tilde << 1, 2, 3, 4;
  const Eigen::VectorXcd c = complex_direction(c_tilde, 2);
  CHECK(c(0) == Cplx(3, 1));
  CHECK(c(1) == Cplx(4, 2));
}

TEST_CASE("row dot c~ equals the rotated imaginary part") {
  // The realification convention in one identity: for row j = m*n + i,
  // rows(j) . c~ must equal Im(rho_m * V.row(i) * c) exactly.
  const Eigen::MatrixXcd V = random_complex(4, 2, 8);
  const AugmentedSystem sys = build_augmented(V, 3);
  Rng rng(9);
  Eigen::VectorXd c_tilde(4);
  for (int i = 0; i < 4; ++i) c_tilde(i) = rng.normal();
  c_tilde.normalize();
  const Eigen::VectorXcd c = complex_direction(c_tilde, 2);
  for (int j = 0; j < sys.row_count(); ++j) {
    const int m = j / sys.n, i = j % sys.n;
    const Cplx alpha = sys.rotations[m] * (V.row(i) * c)(0);
    CHECK(std::abs(sys.rows.row(j).dot(c_tilde) - alpha.imag()) <= 1e-12);
  }
}

TEST_CASE("valid index sets stream in lexicographic order") {
  const Eigen::MatrixXcd V = random_complex(2, 2, 3);
  const AugmentedSystem sys = build_augmented(V, 3); // 6 rows, groups j % 2

  // Independent count: 3-subsets of 6 rows with at most two per group.
  int want = 0;
  for (int a = 0; a < 6; ++a) {
    for (int b = a + 1; b < 6; ++b) {
      for (int c = b + 1; c < 6; ++c) {
        int per_group[2] = {0, 0};
        ++per_group[a % 2];
        ++per_group[b % 2];
        ++per_group[c % 2];
        if (per_group[0] <= 2 && per_group[1] <= 2) ++want;
      }
    }
  }
  CHECK(want == 18);

  IndexSetStream stream = stream_valid_index_sets(sys);
  std::vector<int> I;
  std::vector<std::vector<int>> seen;
  while (stream.next(I)) {
    REQUIRE(I.size() == 3);
    CHECK(std::is_sorted(I.begin(), I.end()));
    int per_group[2] = {0, 0};
    for (int j : I) ++per_group[j % 2];
    CHECK(per_group[0] <= 2);
    CHECK(per_group[1] <= 2);
    seen.push_back(I);
  }
  CHECK(static_cast<int>(seen.size()) == want);
  CHECK(std::is_sorted(seen.begin(), seen.end()));
}

TEST_CASE("index set stream sizes at the corners") {
  const Eigen::MatrixXcd V21 = random_complex(2, 1, 4);
  IndexSetStream singletons = stream_valid_index_sets(build_augmented(V21, 3));
  std::vector<int> I;
  int count = 0;
  while (singletons.next(I)) ++count;
  CHECK(count == 6);

  const Eigen::MatrixXcd V32 = random_complex(3, 2, 4);
  IndexSetStream lone = stream_valid_index_sets(build_augmented(V32, 2));
  count = 0;
  while (lone.next(I)) ++count;
  CHECK(count == 1); // three rows, one per group, single 3-subset
}

TEST_CASE("null vector of a single-row system") {
  AugmentedSystem sys;
  sys.n = 1;
  sys.r = 1;
  sys.K = 3;
  sys.b_k = 1;
  sys.rows = Eigen::MatrixXd::Zero(1, 2);
  sys.rows(0, 0) = 1.0; // row [1, 0]
  sys.rotations = {Cplx(1, 0)};
  const auto c_tilde = vertex_nullvector(sys, {0});
  REQUIRE(c_tilde.has_value());
  CHECK(std::abs((*c_tilde)(0)) <= 1e-12);
  CHECK(std::abs(std::abs((*c_tilde)(1)) - 1.0) <= 1e-12);
}

TEST_CASE("rank-deficient submatrices are skipped") {
  AugmentedSystem sys;
  sys.n = 3;
  sys.r = 2;
  sys.K = 2;
  sys.b_k = 1;
  sys.rows = Eigen::MatrixXd::Zero(3, 4);
  sys.rows.row(0) << 1, 0, 0, 0;
  sys.rows.row(1) << 1, 0, 0, 0; // duplicate of row 0
  sys.rows.row(2) << 0, 1, 0, 0;
  sys.rotations = {Cplx(1, 0)};
  CHECK(!vertex_nullvector(sys, {0, 1, 2}).has_value());
}

TEST_CASE("accepted vertices satisfy residual and unit norm") {
  const Eigen::MatrixXcd V = random_complex(4, 2, 19);
  const AugmentedSystem sys = build_augmented(V, 3);
  IndexSetStream stream = stream_valid_index_sets(sys);
  std::vector<int> I;
  int accepted = 0;
  while (stream.next(I)) {
    const auto c_tilde = vertex_nullvector(sys, I);
    if (!c_tilde) continue;
    ++accepted;
    CHECK(std::abs(c_tilde->norm() - 1.0) <= 1e-12);
    for (int j : I) {
      CHECK(std::abs(sys.rows.row(j).dot(*c_tilde)) <= kVertexResidualTol);
    }
  }
  CHECK(accepted > 0);
}

TEST_CASE("two rows of one group force the factor row to zero") {
  const Eigen::MatrixXcd V = random_complex(2, 2, 23);
  const AugmentedSystem sys = build_augmented(V, 3);
  IndexSetStream stream = stream_valid_index_sets(sys);
  std::vector<int> I;
  bool found = false;
  while (stream.next(I)) {
    int per_group[2] = {0, 0};
    for (int j : I) ++per_group[j % 2];
    const int doubled = per_group[0] == 2 ? 0 : per_group[1] == 2 ? 1 : -1;
    if (doubled < 0) continue;
    const auto c_tilde = vertex_nullvector(sys, I);
    if (!c_tilde) continue;
    found = true;
    const Eigen::VectorXcd c = complex_direction(*c_tilde, 2);
    const double alpha = std::abs((V.row(doubled) * c)(0));
    CHECK(alpha <= 1e-8 * V.row(doubled).norm());

    // Ambiguous in every direction: the expansion must offer all K labels.
    const auto expanded = expand_vertex(V, c, I, sys);
    std::set<int> labels_there;
    for (const auto& a : expanded) labels_there.insert(a.labels[doubled]);
    CHECK(labels_there == std::set<int>{0, 1, 2});
  }
  CHECK(found);
}

TEST_CASE("decision rule at a bisector emits both adjacent labels") {
  Eigen::MatrixXcd V(2, 1);
  V(0, 0) = 1.0;
  V(1, 0) = std::polar(1.0, pi / 3); // coordinate 1 sits on bisector 0
  const AugmentedSystem sys = build_augmented(V, 3);

  Eigen::VectorXcd c(1);
  c(0) = 1.0; // alpha_0 at phase 0 (interior), alpha_1 on the bisector ray
  const auto expanded = expand_vertex(V, c, {0 * 2 + 1}, sys);
  CHECK(label_sets(expanded) ==
        std::vector<std::vector<int>>{{0, 0}, {0, 1}});
}

TEST_CASE("decision rule inside a sector picks the nearest root") {
  Eigen::MatrixXcd V(2, 1);
  V(0, 0) = 1.0;
  V(1, 0) = std::polar(1.0, pi / 3);
  const AugmentedSystem sys = build_augmented(V, 3);

  // alpha_0 at phase 2pi/3 is exactly root 1; alpha_1 lands on bisector 1.
  Eigen::VectorXcd c(1);
  c(0) = std::polar(1.0, 2 * pi / 3);
  const auto expanded = expand_vertex(V, c, {1 * 2 + 1}, sys);
  CHECK(label_sets(expanded) ==
        std::vector<std::vector<int>>{{1, 1}, {1, 2}});
}

TEST_CASE("odd K: the ray opposite a bisector is strict") {
  Eigen::MatrixXcd V(2, 1);
  V(0, 0) = 1.0;
  V(1, 0) = 1.0;
  const AugmentedSystem sys = build_augmented(V, 3);

  // Both coordinates at phase 0. Row (m=1, i=1) vanishes there: phase 0 is
  // on the line of bisector pi but on the far ray, which for odd K points
  // at root 0, so no ambiguity is emitted.
  Eigen::VectorXcd c(1);
  c(0) = 1.0;
  const auto expanded = expand_vertex(V, c, {1 * 2 + 1}, sys);
  CHECK(label_sets(expanded) == std::vector<std::vector<int>>{{0, 0}});
}

TEST_CASE("even K: the opposite ray is the antipodal bisector") {
  Eigen::MatrixXcd V(1, 1);
  V(0, 0) = 1.0;
  const AugmentedSystem sys = build_augmented(V, 4); // bisectors pi/4, 3pi/4

  Eigen::VectorXcd c(1);
  c(0) = std::polar(1.0, 5 * pi / 4); // opposite ray of bisector 0
  const auto expanded = expand_vertex(V, c, {0}, sys);
  CHECK(label_sets(expanded) == std::vector<std::vector<int>>{{2}, {3}});
}

TEST_CASE("zero factor rows are pinned to label zero") {
  Eigen::MatrixXcd V = random_complex(3, 2, 29);
  V.row(2).setZero();
  const AugmentedSystem sys = build_augmented(V, 3);
  IndexSetStream stream = stream_valid_index_sets(sys);
  std::vector<int> I;
  int checked = 0;
  while (stream.next(I)) {
    const auto c_tilde = vertex_nullvector(sys, I);
    if (!c_tilde) continue;
    const Eigen::VectorXcd c = complex_direction(*c_tilde, 2);
    for (const auto& a : expand_vertex(V, c, I, sys)) {
      CHECK(a.labels[2] == 0);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("rank-two solve matches the exhaustive reference") {
  const Eigen::MatrixXcd V = random_complex(4, 2, 7);
  const HermitianOperand Q = psd_of(V);
  const RankRSolution sol = solve_rankr(Q, V, 2, 3);
  const double best = exhaustive_max(Q, 3);
  CHECK(std::abs(sol.objective - best) <= 1e-9 * std::max(1.0, best));
  CHECK(sol.max_vertex_residual <= kVertexResidualTol);
  CHECK(sol.max_unit_norm_error <= 1e-12);
  CHECK(std::abs(quadratic_form(Q, sol.assignment) - sol.objective) <=
        1e-9 * std::max(1.0, std::abs(sol.objective)));
}

TEST_CASE("rank-three solve matches the exhaustive reference") {
  const Eigen::MatrixXcd V = random_complex(5, 3, 11);
  const HermitianOperand Q = psd_of(V);
  const RankRSolution sol = solve_rankr(Q, V, 3, 3);
  const double best = exhaustive_max(Q, 3);
  CHECK(std::abs(sol.objective - best) <= 1e-9 * std::max(1.0, best));
}

TEST_CASE("exactness holds for K = 2 and K = 4") {
  const Eigen::MatrixXcd V2 = random_complex(4, 2, 13);
  const HermitianOperand Q2 = psd_of(V2);
  const RankRSolution s2 = solve_rankr(Q2, V2, 2, 2);
  const double b2 = exhaustive_max(Q2, 2);
  CHECK(std::abs(s2.objective - b2) <= 1e-9 * std::max(1.0, b2));

  const Eigen::MatrixXcd V4 = random_complex(3, 2, 17);
  const HermitianOperand Q4 = psd_of(V4);
  const RankRSolution s4 = solve_rankr(Q4, V4, 2, 4);
  const double b4 = exhaustive_max(Q4, 4);
  CHECK(std::abs(s4.objective - b4) <= 1e-9 * std::max(1.0, b4));
}

TEST_CASE("a zero second column reduces to the rank-one solver") {
  Eigen::VectorXcd q = random_complex(5, 1, 37);
  q /= q.norm();
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(5, 2);
  V.col(0) = std::sqrt(1.9) * q;
  const HermitianOperand Q = psd_of(V);

  const RankRSolution wide = solve_rankr(Q, V, 2, 3);
  const Rank1Solution narrow = solve_rank1(Q, q, 3);
  CHECK(wide.objective == doctest::Approx(narrow.objective).epsilon(1e-12));
}

TEST_CASE("objective is monotone in the factor prefix") {
  for (std::uint64_t seed : {51u, 52u, 53u}) {
    const Eigen::MatrixXcd W = random_complex(5, 2, seed);
    const HermitianOperand Q = psd_of(W); // exactly rank 2
    const Eigen::MatrixXcd V = top_r_factor(Q, 2).scaled_factor();
    const RankRSolution two = solve_rankr(Q, V, 2, 3);
    const RankRSolution one = solve_rankr(Q, V.leftCols(1), 1, 3);
    CHECK(two.objective >= one.objective - 1e-9 * std::abs(one.objective));
  }
}

TEST_CASE("worker count never changes the rank-r result") {
  const WeightedGraph g = generate_er(40, 0.15, 21);
  const Laplacian L(g);
  const Eigen::MatrixXcd V = top_r_factor(L, 2).scaled_factor();
  ParallelConfig one, three;
  one.workers = 1;
  three.workers = 3;
  const RankRResult a = maximize_rankr(V, 3, one);
  const RankRResult b = maximize_rankr(V, 3, three);
  CHECK(a.factor_objective == b.factor_objective);
  CHECK(a.assignment.labels == b.assignment.labels);
  CHECK(a.candidates == b.candidates);
}

TEST_CASE("candidate counts stay under the closed-form bound") {
  for (int n : {4, 5, 6}) {
    const Eigen::MatrixXcd V = random_complex(n, 2, 60 + n);
    const RankRResult res = maximize_rankr(V, 3);
    CHECK(res.candidates <=
          static_cast<std::int64_t>(candidate_count_bound(n, 2, 3)));
  }
  CHECK(candidate_count_bound(5, 1, 3) >= 5);
  CHECK(candidate_count_bound(6, 2, 3) > candidate_count_bound(4, 2, 3));
  CHECK(candidate_count_bound(10, 2, 3) > candidate_count_bound(8, 2, 3));
}

TEST_CASE("infeasible shapes are rejected") {
  const Eigen::MatrixXcd V = random_complex(1, 2, 71);
  const HermitianOperand Q = psd_of(V);
  CHECK_THROWS_AS(solve_rankr(Q, V, 2, 2), std::invalid_argument);

  const Eigen::MatrixXcd V42 = random_complex(4, 2, 72);
  CHECK_THROWS_AS(solve_rankr(psd_of(random_complex(3, 2, 73)), V42, 2, 3),
                  std::invalid_argument);
}

TEST_CASE("expired deadline flags the result") {
  const Eigen::MatrixXcd V = random_complex(12, 2, 81);
  const Deadline past = Deadline::after(std::chrono::seconds(-1));
  const RankRResult res = maximize_rankr(V, 3, {}, past);
  CHECK(res.timed_out);
}
