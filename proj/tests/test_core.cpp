#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "kcut/alphabet.hpp"
#include "kcut/assignment.hpp"
#include "kcut/operand.hpp"
#include "kcut/rng.hpp"

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

// Exhaustive max of the form over all K^n assignments, the reference the
// solvers are judged against. Plain odometer loop, nothing shared with the
// library's enumeration code.
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

TEST_CASE("alphabet geometry for small K") {
  const Alphabet a2 = make_alphabet(2);
  CHECK(a2.b_k == 1);
  CHECK(a2.boundary_angles.size() == 1);
  CHECK(a2.boundary_angles[0] == doctest::Approx(pi / 2).epsilon(1e-15));

  const Alphabet a3 = make_alphabet(3);
  CHECK(a3.b_k == 3);
  REQUIRE(a3.boundary_angles.size() == 3);
  CHECK(a3.boundary_angles[0] == doctest::Approx(pi / 3).epsilon(1e-15));
  CHECK(a3.boundary_angles[1] == doctest::Approx(pi).epsilon(1e-15));
  CHECK(a3.boundary_angles[2] == doctest::Approx(5 * pi / 3).epsilon(1e-15));

  const Alphabet a4 = make_alphabet(4);
  CHECK(a4.b_k == 2);

  for (int K = 2; K <= 7; ++K) {
    const Alphabet a = make_alphabet(K);
    REQUIRE(static_cast<int>(a.roots.size()) == K);
    CHECK(a.roots[0] == Cplx(1.0, 0.0));
    for (const Cplx& root : a.roots) {
      CHECK(std::abs(root) == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(a.b_k == (K % 2 == 0 ? K / 2 : K));
  }

  CHECK_THROWS_AS(make_alphabet(1), std::invalid_argument);
  CHECK_THROWS_AS(make_alphabet(0), std::invalid_argument);
}

TEST_CASE("boundary angles split by parity") {
  // Odd K: all K bisector rays are distinct lines, so no two retained
  // angles may differ by pi. Even K: the K rays pair up into K/2 lines,
  // and the retained half plus its pi-shifts recovers every bisector.
  for (int K : {3, 5, 7}) {
    const Alphabet a = make_alphabet(K);
    for (size_t i = 0; i < a.boundary_angles.size(); ++i) {
      for (size_t j = i + 1; j < a.boundary_angles.size(); ++j) {
        const double diff = std::abs(a.boundary_angles[i] - a.boundary_angles[j]);
        CHECK(std::abs(diff - pi) > 1e-9);
      }
    }
  }
  for (int K : {2, 4, 6}) {
    const Alphabet a = make_alphabet(K);
    std::vector<double> all;
    for (int m = 0; m < K; ++m) all.push_back(pi * (2 * m + 1) / K);
    for (double want : all) {
      bool covered = false;
      for (double kept : a.boundary_angles) {
        const double d = std::fmod(std::abs(want - kept), 2 * pi);
        if (std::min(d, 2 * pi - d) < 1e-12 ||
            std::abs(std::min(d, 2 * pi - d) - pi) < 1e-12) {
          covered = true;
        }
      }
      CHECK(covered);
    }
  }
}

TEST_CASE("quadratic form on identity and zero") {
  const int n = 3;
  HermitianOperand eye(Eigen::MatrixXcd::Identity(n, n));
  HermitianOperand zero(Eigen::MatrixXcd::Zero(n, n));
  for (std::vector<int> labels :
       {std::vector<int>{0, 0, 0}, {0, 1, 2}, {2, 2, 1}}) {
    const Assignment a(labels, 3);
    CHECK(quadratic_form(eye, a) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(quadratic_form(zero, a) == 0.0);
  }
}

TEST_CASE("triangle form 3I - J peaks at 9 on a rainbow labeling") {
  Eigen::MatrixXcd Q = 3.0 * Eigen::MatrixXcd::Identity(3, 3) -
                       Eigen::MatrixXcd::Ones(3, 3);
  const HermitianOperand op(Q, 1e-9, true);
  // z = (1, w, w^2) sums to zero, so z^H (3I - J) z = 3*3 - |sum z|^2 = 9.
  CHECK(quadratic_form(op, Assignment({0, 1, 2}, 3)) ==
        doctest::Approx(9.0).epsilon(1e-12));
  CHECK(exhaustive_max(op, 3) == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("mislabeled hermitian operand is rejected at evaluation") {
  Eigen::MatrixXcd m(2, 2);
  m << Cplx(0, 0), Cplx(0, 1), Cplx(0, 1), Cplx(0, 0); // m != m^H
  CHECK_THROWS_AS(HermitianOperand(m, 1e-9, false, true),
                  std::invalid_argument);
  const HermitianOperand op(m); // tolerated, but flagged
  CHECK(!op.is_hermitian());
  CHECK(op.hermitian_deviation() > 1.0);
  // Non-Hermitian operands legitimately evaluate (perturbation sums do);
  // only a claimed-Hermitian operand with a large imaginary residue throws.
  CHECK(std::isfinite(quadratic_form(op, Assignment({0, 1}, 3))));
}

TEST_CASE("dimension mismatch throws") {
  HermitianOperand eye(Eigen::MatrixXcd::Identity(3, 3));
  CHECK_THROWS_AS(quadratic_form(eye, Assignment({0, 1}, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(factor_quadratic_form(Eigen::MatrixXcd::Ones(4, 2),
                                        Assignment({0, 1}, 3)),
                  std::invalid_argument);
}

TEST_CASE("factor form of a coordinate vector") {
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(2, 1);
  V(0, 0) = 1.0;
  for (std::vector<int> labels : {std::vector<int>{0, 0}, {1, 2}, {2, 0}}) {
    CHECK(factor_quadratic_form(V, Assignment(labels, 3)) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("factor form agrees with the dense form of V V^H") {
  const Eigen::MatrixXcd V = random_complex(4, 2, 7);
  const HermitianOperand dense(
      Eigen::MatrixXcd((V * V.adjoint() + (V * V.adjoint()).adjoint()) / 2.0),
      1e-9, true);
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<int> labels(4);
    for (int& l : labels) l = static_cast<int>(rng.below(3));
    const Assignment a(labels, 3);
    const double got = factor_quadratic_form(V, a);
    const double want = quadratic_form(dense, a);
    CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("factor form is homogeneous of degree two in V") {
  const Eigen::MatrixXcd V = random_complex(5, 2, 13);
  const Assignment a({0, 1, 2, 1, 0}, 3);
  CHECK(factor_quadratic_form(2.0 * V, a) ==
        doctest::Approx(4.0 * factor_quadratic_form(V, a)).epsilon(1e-12));
}

TEST_CASE("canonical form zeroes the first label") {
  CHECK(canonical_form(Assignment({1, 2, 0}, 3)).labels ==
        std::vector<int>{0, 1, 2});
  CHECK(canonical_form(Assignment({0, 0, 0}, 3)).labels ==
        std::vector<int>{0, 0, 0});
  CHECK(canonical_form(Assignment({2, 2, 2}, 3)).labels ==
        std::vector<int>{0, 0, 0});
  CHECK(canonical_form(Assignment({3, 1}, 5)).labels ==
        std::vector<int>{0, 3});
}

TEST_CASE("psd operands never dip below the roundoff floor") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Eigen::MatrixXcd B = random_complex(5, 5, seed);
    Eigen::MatrixXcd Q = B * B.adjoint();
    Q = (Q + Q.adjoint()) / 2.0;
    const HermitianOperand op(Q, 1e-9, true);
    Rng rng(seed + 100);
    for (int rep = 0; rep < 30; ++rep) {
      std::vector<int> labels(5);
      for (int& l : labels) l = static_cast<int>(rng.below(3));
      CHECK(quadratic_form(op, Assignment(labels, 3)) >=
            -1e-8 * op.frobenius_norm());
    }
  }
}

TEST_CASE("global phase leaves the form unchanged") {
  const Eigen::MatrixXcd B = random_complex(6, 6, 17);
  Eigen::MatrixXcd Q = B + B.adjoint();
  const HermitianOperand op(Q, 1e-9, false);
  Rng rng(18);
  for (int K : {2, 3, 4, 5}) {
    std::vector<int> labels(6);
    for (int& l : labels) l = static_cast<int>(rng.below(K));
    const Assignment a(labels, K);
    const double base = quadratic_form(op, a);
    for (int t = 0; t < K; ++t) {
      const double rotated = quadratic_form(op, rotate(a, t));
      CHECK(std::abs(rotated - base) <= 1e-9 * std::max(1.0, std::abs(base)));
    }
  }
}

TEST_CASE("rotation composes with canonicalization") {
  const Assignment a({2, 0, 1}, 3);
  CHECK(rotate(a, 1).labels == std::vector<int>{0, 1, 2});
  CHECK(canonical_form(rotate(a, 2)).labels == canonical_form(a).labels);
  CHECK(lex_less(Assignment({0, 1}, 3), Assignment({0, 2}, 3)));
  CHECK(!lex_less(Assignment({0, 2}, 3), Assignment({0, 2}, 3)));
}

TEST_CASE("assignment symbols live on the unit circle") {
  const Assignment a({0, 1, 2, 3}, 4);
  const Eigen::VectorXcd z = a.symbols();
  CHECK(z(0) == Cplx(1, 0));
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(z(i)) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(std::abs(z(1) - Cplx(0, 1)) < 1e-15);
}
