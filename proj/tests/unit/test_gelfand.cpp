#include <cmath>
#include <random>

#include "doctest.h"
#include "pathhj/errors.hpp"
#include "pathhj/gelfand.hpp"

using namespace pathhj;

namespace {

Vec random_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

}  // namespace

TEST_CASE("sine modes are H-orthonormal eigenvectors of the discrete Laplacian") {
  const auto d = assemble_discretization(M_PI, 15);
  CHECK(d.h == doctest::Approx(M_PI / 16).epsilon(1e-15));
  for (int j = 1; j <= 4; ++j) {
    for (int k = 1; k <= 4; ++k) {
      CHECK(d.inner(d.sine_mode(j), d.sine_mode(k)) == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
    }
    // 4/h^2 sin^2(k pi h / 2l)
    const double lam = 4.0 / (d.h * d.h) * std::pow(std::sin(j * M_PI * d.h / (2.0 * M_PI)), 2);
    CHECK(d.laplacian_eigenvalue(j) == doctest::Approx(lam).epsilon(1e-13));
    const Vec r = d.apply_laplacian(d.sine_mode(j)) - lam * d.sine_mode(j);
    CHECK(r.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(d.norm_v(d.sine_mode(j)) == doctest::Approx(std::sqrt(lam)).epsilon(1e-12));
  }
}

TEST_CASE("Laplacian solve inverts apply and the dual norm is dual") {
  const auto d = assemble_discretization(2.0, 12);
  std::mt19937_64 rng(1);
  const Vec u = random_vec(d.n, rng);
  CHECK((d.solve_laplacian(d.apply_laplacian(u)) - u).norm() < 1e-10);
  // ||u||_* = sup (u, v) / ||v|| is attained at v = K^{-1} u.
  const Vec v = d.solve_laplacian(u);
  CHECK(d.norm_vstar(u) == doctest::Approx(d.inner(u, v) / d.norm_v(v)).epsilon(1e-12));
  for (int k = 0; k < 20; ++k) {
    const Vec w = random_vec(d.n, rng);
    CHECK(d.inner(u, w) <= d.norm_vstar(u) * d.norm_v(w) + 1e-12);
    CHECK(d.norm_h(w) <= d.poincare_constant * d.norm_v(w) + 1e-12);
    CHECK(d.norm_vstar(w) <= d.dual_embedding_constant * d.norm_h(w) + 1e-12);
  }
}

TEST_CASE("tridiagonal solve") {
  Tridiagonal t{Vec::Constant(5, -1.0), Vec::Constant(5, 4.0), Vec::Constant(5, -1.0)};
  const Vec x = Vec::LinSpaced(5, 1.0, 5.0);
  CHECK((t.solve(t.apply(x)) - x).norm() < 1e-13);
}

TEST_CASE("p-Laplacian constants and derivatives") {
  const auto d = assemble_discretization(3.0, 10);
  const auto op = make_operator(OperatorKind::p_laplacian, 4.0, d);
  CHECK(op.c2 == doctest::Approx(std::pow(3.0, -1.0)));
  CHECK(op.c1 == doctest::Approx(std::pow(d.h, -1.0)));
  CHECK(op.q == doctest::Approx(4.0 / 3.0));

  std::mt19937_64 rng(7);
  const Vec v = random_vec(d.n, rng);
  const Vec a = apply_operator(op, d, 0.0, v);
  const Tridiagonal J = operator_jacobian(op, d, v);
  const double s = 1e-6;
  for (int i = 0; i < d.n; ++i) {
    Vec e = Vec::Zero(d.n);
    e[i] = 1.0;
    // A is the H-gradient of the potential.
    const double dphi =
        (operator_potential(op, d, v + s * e) - operator_potential(op, d, v - s * e)) / (2 * s);
    CHECK(dphi == doctest::Approx(d.inner(a, e)).epsilon(1e-6));
    const Vec col = (apply_operator(op, d, 0.0, v + s * e) - apply_operator(op, d, 0.0, v - s * e)) / (2 * s);
    CHECK((col - J.apply(e)).cwiseAbs().maxCoeff() < 1e-5 * (1.0 + col.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("linear Laplacian matches the second-difference matrix") {
  const auto d = assemble_discretization(M_PI, 9);
  const auto op = make_operator(OperatorKind::linear_laplacian, 2.0, d);
  CHECK(op.c1 == 1.0);
  CHECK(op.c2 == 1.0);
  const Vec v = Vec::LinSpaced(9, -1.0, 2.0);
  CHECK((apply_operator(op, d, 0.3, v) - d.laplacian_matrix() * v).norm() < 1e-12);
}

TEST_CASE("operator hypotheses on random samples") {
  const auto d = assemble_discretization(M_PI, 16);
  std::mt19937_64 rng(3);
  std::vector<std::pair<Vec, Vec>> pairs;
  std::vector<Vec> samples;
  for (int k = 0; k < 50; ++k) {
    pairs.emplace_back(random_vec(d.n, rng), random_vec(d.n, rng));
    samples.push_back(pairs.back().first);
  }
  for (auto [kind, p] : {std::pair{OperatorKind::linear_laplacian, 2.0},
                         std::pair{OperatorKind::p_laplacian, 4.0},
                         std::pair{OperatorKind::p_laplacian, 3.0}}) {
    const auto op = make_operator(kind, p, d);
    CHECK(check_monotonicity(op, d, pairs, 1e-10).passed);
    const auto c = check_coercivity_boundedness(op, d, samples, 1e-10);
    CHECK(c.coercive);
    CHECK(c.bounded);
    CHECK(c.measured_c2 >= op.c2 - 1e-10);
  }
  const auto zero = make_operator(OperatorKind::zero, 2.0, d);
  CHECK(check_monotonicity(zero, d, pairs, 1e-10).passed);
  CHECK_FALSE(check_coercivity_boundedness(zero, d, samples, 1e-10).coercive);
}

TEST_CASE("operator kind names") {
  for (auto k : {OperatorKind::linear_laplacian, OperatorKind::p_laplacian, OperatorKind::zero}) {
    CHECK(operator_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(operator_kind_from_string("biharmonic"), InvalidArgument);
  CHECK_THROWS_AS(assemble_discretization(1.0, 0), InvalidArgument);
}

TEST_CASE("non-compactness without coercivity") {
  const auto r = non_compactness_example(32, 8);
  REQUIRE(r.modes.size() == 8);
  CHECK(r.forcing_admissible);
  const double h = 2.0 * M_PI / 33.0;
  for (std::size_t i = 0; i < r.modes.size(); ++i) {
    const int k = r.modes[i];
    CHECK(r.terminal_norms[i] == doctest::Approx(1.0).epsilon(1e-12));
    // sin(k xi) is discrete sine mode 2k on (0, 2 pi).
    const double lam = 4.0 / (h * h) * std::pow(std::sin(k * h / 2.0), 2);
    CHECK(r.l2v_norms[i] == doctest::Approx(std::sqrt(lam / 3.0)).epsilon(1e-12));
    // sum_j h sin(k xi_j) (xi_j / 2 pi) / sqrt(pi); continuum value -1 / (k sqrt(pi)).
    double pairing = 0.0;
    for (int j = 1; j <= 32; ++j) pairing += h * std::sin(k * j * h) * (j * h / (2.0 * M_PI));
    CHECK(r.pairings_with_test[i] == doctest::Approx(pairing / std::sqrt(M_PI)).epsilon(1e-12));
    if (i > 0) CHECK(std::abs(r.pairings_with_test[i]) < std::abs(r.pairings_with_test[i - 1]));
  }
  CHECK(r.pairings_with_test[0] * std::sqrt(M_PI) == doctest::Approx(-1.0).epsilon(0.01));
  CHECK(r.pairings_with_test[0] == doctest::Approx(-0.56248413656694884).epsilon(1e-12));
}
