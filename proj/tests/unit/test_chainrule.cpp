#include <cmath>
#include <limits>

#include "doctest.h"
#include "pathhj/bundle.hpp"
#include "pathhj/chainrule.hpp"
#include "pathhj/errors.hpp"

using namespace pathhj;

namespace {

Path free_heat(const GelfandDiscretization& d, std::size_t steps) {
  const auto op = make_operator(OperatorKind::linear_laplacian, 2.0, d);
  return solve_ivp(d, op, 0.0, Path::constant(TimeGrid(1.0, steps), d.sine_mode(1)),
                   stored_forcing_rhs(Eigen::MatrixXd::Zero(d.n, static_cast<Eigen::Index>(steps))));
}

}  // namespace

TEST_CASE("quadratic functional on the heat path") {
  const auto d = assemble_discretization(M_PI, 16);
  const auto phi = quadratic_plus_integral(d, weighted_square(d, 1.0));
  // continuum: e^{-2} + (1 - e^{-2}) / 2 for x = e^{-t} e_1
  const double exact = std::exp(-2.0) + (1.0 - std::exp(-2.0)) / 2.0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t N : {16u, 32u, 64u}) {
    const Path x = free_heat(d, N);
    const double r = 1.0 / (1.0 + d.laplacian_eigenvalue(1) / static_cast<double>(N));
    double discrete = std::pow(r, 2.0 * N);
    for (std::size_t j = 0; j < N; ++j) discrete += std::pow(r, 2.0 * j) / static_cast<double>(N);
    const double value = phi.value(PathView(x, N));
    CHECK(value == doctest::Approx(discrete).epsilon(1e-13));
    const double err = std::abs(value - exact);
    CHECK(err <= 1.0 / static_cast<double>(N));
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("integration by parts is exact up to the squared increments") {
  const auto d = assemble_discretization(M_PI, 12);
  const auto op = make_operator(OperatorKind::linear_laplacian, 2.0, d);
  const auto b = sample_bundle(d, op, 0.0, Path::constant(TimeGrid(1.0, 32), d.sine_mode(1)),
                               1.0, 3, 4);
  const Path& x = b.members[1];
  const auto r = check_parts(d, op, x, x, 0.0, 1.0);
  // 2 (x', x_i) dt = |x_{i+1}|^2 - |x_i|^2 - |x_{i+1} - x_i|^2
  double sq = 0.0;
  for (std::size_t i = 0; i + 1 < x.nodes(); ++i) sq += std::pow(d.norm_h(x.at(i + 1) - x.at(i)), 2);
  CHECK(r.residual == doctest::Approx(sq).epsilon(1e-9));
  CHECK(r.dt == doctest::Approx(1.0 / 32));
}

TEST_CASE("chain rule residual is O(dt)") {
  const auto d = assemble_discretization(M_PI, 16);
  const auto op = make_operator(OperatorKind::linear_laplacian, 2.0, d);
  const auto quad = quadratic_plus_integral(d, weighted_square(d, 1.0));
  const auto comp = smooth_composite(d, 0.2, 0.5, 0.0);
  std::vector<double> dts, rq, rc;
  for (std::size_t N : {16u, 32u, 64u}) {
    const Path x = free_heat(d, N);
    const auto a = check_chain_rule(d, op, quad, x, 0.0, 1.0);
    const auto c = check_chain_rule(d, op, comp, x, 0.0, 1.0);
    CHECK(a.passed);
    CHECK(c.passed);
    dts.push_back(1.0 / static_cast<double>(N));
    rq.push_back(a.residual);
    rc.push_back(c.residual);
  }
  CHECK(observed_order(dts, rq).passed);
  CHECK(observed_order(dts, rc).passed);
}

TEST_CASE("derivative limits") {
  const auto d = assemble_discretization(M_PI, 16);
  const Path x = free_heat(d, 32);
  // psi = 1: phi(t, x) = |x(t)|^2 + t, so the stopped-path quotient is exactly 1.
  const auto one = quadratic_plus_integral(d, [](double, const Vec&) { return 1.0; }, "unit");
  const auto r = check_derivative_limits(d, one, 0.5, x, 2);
  CHECK(r.declared_dt == 1.0);
  CHECK(r.quotient_dt == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.passed);
  // along the ray x(t0) + (s - t0) e_i the quadratic quotient is d_t + (e_i, 2 x) + dt
  for (std::size_t i = 0; i < r.quotient_dir.size(); ++i) {
    CHECK(r.quotient_dir[i] - r.declared_dir[i] == doctest::Approx(r.dt).epsilon(1e-9));
  }
  const auto comp = smooth_composite(d, 0.2, 0.5, 0.0);
  CHECK(check_derivative_limits(d, comp, 0.5, x, 3).passed);
}

TEST_CASE("observed orders") {
  const auto r = observed_order({0.1, 0.05, 0.025}, {0.3, 0.15, 0.075});
  REQUIRE(r.orders.size() == 2);
  CHECK(r.orders[0] == doctest::Approx(1.0));
  CHECK(r.min_order == doctest::Approx(1.0));
  CHECK(r.passed);
  CHECK_FALSE(observed_order({0.1, 0.05}, {0.3, 0.2}).passed);
  const auto e = observed_order({0.1, 0.05}, {0.0, 0.0});
  CHECK(e.exact);
  CHECK(e.passed);
}

TEST_CASE("path velocity needs stored forcing") {
  const auto d = assemble_discretization(M_PI, 8);
  const auto op = make_operator(OperatorKind::linear_laplacian, 2.0, d);
  const Path c = Path::constant(TimeGrid(1.0, 4), d.sine_mode(1));
  CHECK_THROWS_AS(path_velocity(d, op, c, 0), InvalidArgument);
  const Path x = free_heat(d, 8);
  // x' = -A x_{i+1} on the free path
  CHECK((path_velocity(d, op, x, 0) + d.laplacian_eigenvalue(1) * x.at(1)).norm() < 1e-12);
}
