#include <cmath>

#include "doctest.h"
#include "pathhj/bundle.hpp"
#include "pathhj/errors.hpp"
#include "pathhj/evolution.hpp"

using namespace pathhj;

namespace {

Path free_heat(const GelfandDiscretization& d, std::size_t steps, const Vec& x0) {
  const auto op = make_operator(OperatorKind::linear_laplacian, 2.0, d);
  return solve_ivp(d, op, 0.0, Path::constant(TimeGrid(1.0, steps), x0),
                   stored_forcing_rhs(Eigen::MatrixXd::Zero(d.n, static_cast<Eigen::Index>(steps))));
}

}  // namespace

TEST_CASE("implicit Euler on a sine mode is the scalar recurrence") {
  const auto d = assemble_discretization(M_PI, 16);
  for (int k : {1, 3}) {
    const Path x = free_heat(d, 32, d.sine_mode(k));
    const double r = 1.0 / (1.0 + d.laplacian_eigenvalue(k) / 32.0);
    for (std::size_t i = 0; i < x.nodes(); ++i) {
      const Vec e = x.at(i) - std::pow(r, static_cast<double>(i)) * d.sine_mode(k);
      CHECK(e.cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("heat error against the continuum solution is O(dt + h^2)") {
  // Calibration: the worst ratio over n in {8,16,32}, dt in {1/16,1/32,1/64} is 0.160.
  for (int n : {8, 16, 32}) {
    const auto d = assemble_discretization(M_PI, n);
    const Vec s = d.nodes().array().sin();
    for (std::size_t N : {16u, 32u, 64u}) {
      const Path x = free_heat(d, N, s);
      double err = 0.0;
      for (std::size_t i = 0; i < x.nodes(); ++i) {
        err = std::max(err, (x.at(i) - std::exp(-x.grid.time(i)) * s).cwiseAbs().maxCoeff());
      }
      CHECK(err <= tol_disc(0.25, 1.0 / N, d.h));
    }
  }
}

TEST_CASE("p-Laplacian step meets its residual tolerance") {
  const auto d = assemble_discretization(M_PI, 16);
  const auto op = make_operator(OperatorKind::p_laplacian, 4.0, d);
  const Vec x0 = 2.0 * d.sine_mode(1) - d.sine_mode(3);
  const Vec g = 0.5 * d.sine_mode(2);
  const Vec x1 = step(d, op, 0.1, x0, g, 0.05);
  CHECK(step_residual(d, op, 0.1, x0, x1, g, 0.05) <= 1e-10 * (1.0 + d.norm_h(g)));
  StepOptions starved;
  starved.max_iterations = 0;
  CHECK_THROWS_AS(step(d, op, 0.1, x0, g, 0.05, starved), NumericalFailure);
}

TEST_CASE("delay right-hand side reads the lagged history") {
  const auto d = assemble_discretization(M_PI, 8);
  const auto op = make_operator(OperatorKind::zero, 2.0, d);
  // A = 0, x' = x(t - 1/2) with x = e_1 on [0, 1/2]: x(t) = (1 + (t - 1/2)) e_1 up to t = 1.
  Path prefix = Path::constant(TimeGrid(1.0, 16), d.sine_mode(1));
  const Path x = solve_ivp(d, op, 0.5, prefix, delay_rhs(0.5, 1.0));
  for (std::size_t i = 8; i < x.nodes(); ++i) {
    CHECK(d.inner(x.at(i), d.sine_mode(1)) == doctest::Approx(1.0 + (x.grid.time(i) - 0.5)).epsilon(1e-12));
  }
  for (std::size_t i = 0; i <= 8; ++i) CHECK((x.at(i) - d.sine_mode(1)).norm() == 0.0);
}

TEST_CASE("continuous dependence and the saturating instance") {
  const auto d = assemble_discretization(M_PI, 16);
  const auto op = make_operator(OperatorKind::linear_laplacian, 2.0, d);
  const double Lf = 1.5;
  const TimeGrid grid(1.0, 64);
  const RhsFunction f = [Lf](const PathView& v) { return Vec(Lf * std::sin(v.now().norm()) * Vec::Ones(v.now().size()) / 4.0); };
  const Path a = Path::constant(grid, d.sine_mode(1));
  const Path b = Path::constant(grid, d.sine_mode(1) + 0.2 * d.sine_mode(2));
  const double tol = tol_disc(0.25, grid.dt(), d.h);
  CHECK(verify_continuous_dependence(d, op, f, Lf, 0.0, a, b, tol).passed);

  const auto zero = make_operator(OperatorKind::zero, 2.0, d);
  const RhsFunction sat = [Lf](const PathView& v) { return Vec(Lf * v.now()); };
  const auto r = verify_continuous_dependence(d, zero, sat, Lf, 0.0, a, b, tol);
  CHECK(r.passed);
  // lagged forcing: gap (1 + Lf dt)^N 0.2 against the bound e^{Lf} 0.2
  CHECK(r.gaps.back() == doctest::Approx(0.2 * std::pow(1.0 + Lf / 64.0, 64.0)).epsilon(1e-10));
  CHECK(r.bounds.back() == doctest::Approx(0.2 * std::exp(Lf)).epsilon(1e-12));
  CHECK(std::abs(r.bounds.back() - r.gaps.back()) <= 3.0 * tol);
}

TEST_CASE("a-priori bound and bundle structure") {
  const auto d = assemble_discretization(M_PI, 16);
  for (auto [kind, p] : {std::pair{OperatorKind::linear_laplacian, 2.0},
                         std::pair{OperatorKind::p_laplacian, 4.0}}) {
    const auto op = make_operator(kind, p, d);
    const Path prefix = Path::constant(TimeGrid(1.0, 64), 0.5 * d.sine_mode(1));
    const auto b = sample_bundle(d, op, 0.0, prefix, 1.5, 24, 7);
    const auto c = apriori_constants(d, op, 0.0, prefix, 1.5);
    REQUIRE(b.size() == 24);
    for (const Path& m : b.members) {
      CHECK(sup_norm(d, m) <= c.C2);
      CHECK(forcing_admissible(d, m, 1.5));
    }
    CHECK(b.members[0].forcing->norm() == 0.0);
    CHECK(check_equiv_pseudometrics(d, op, b, 1.0).passed);
    CHECK(c.C >= c.C2);
  }
}

TEST_CASE("bundles are reproducible from the seed") {
  const auto d = assemble_discretization(M_PI, 8);
  const auto op = make_operator(OperatorKind::linear_laplacian, 2.0, d);
  const Path prefix = Path::constant(TimeGrid(1.0, 16), d.sine_mode(1));
  const auto a = sample_bundle(d, op, 0.0, prefix, 1.0, 12, 99);
  const auto b = sample_bundle(d, op, 0.0, prefix, 1.0, 12, 99);
  const auto c = sample_bundle(d, op, 0.0, prefix, 1.0, 12, 100);
  for (std::size_t j = 0; j < a.size(); ++j) CHECK((a.members[j].values - b.members[j].values).norm() == 0.0);
  CHECK((a.members[11].values - c.members[11].values).norm() > 0.0);
  CHECK(bundle_manifest_json(a) == bundle_manifest_json(b));
}

TEST_CASE("time shift bound") {
  const auto d = assemble_discretization(M_PI, 8);
  const auto op = make_operator(OperatorKind::linear_laplacian, 2.0, d);
  const Path xs = Path::constant(TimeGrid(1.0, 32), d.sine_mode(1));
  const RhsFunction f = [](const PathView& v) { return Vec(0.5 * v.now()); };
  const auto r = verify_time_shift(d, op, f, 0.5, 0.5, xs, 0.25, 0.5, xs,
                                   tol_disc(0.25, 1.0 / 32, d.h));
  CHECK(r.passed);
  CHECK(r.gap <= r.bound);
}
