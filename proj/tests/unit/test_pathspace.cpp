#include <cmath>

#include "doctest.h"
#include "pathhj/errors.hpp"
#include "pathhj/pathspace.hpp"

using namespace pathhj;

namespace {

// x(t_i) = i e_1 on an 8-step grid of [0, 1].
Path ramp(const GelfandDiscretization& d) {
  Path x(TimeGrid(1.0, 8), d.n);
  for (std::size_t i = 0; i < x.nodes(); ++i) {
    x.values.col(static_cast<Eigen::Index>(i)) = static_cast<double>(i) * d.sine_mode(1);
  }
  return x;
}

}  // namespace

TEST_CASE("time grid indexing") {
  const TimeGrid g(2.0, 8);
  CHECK(g.dt() == 0.25);
  CHECK(g.nodes() == 9);
  CHECK(g.index_of(0.75) == 3);
  CHECK(g.contains(2.0));
  CHECK_FALSE(g.contains(0.3));
  CHECK_THROWS_AS(g.index_of(0.3), InvalidArgument);
  CHECK(g.floor_index(0.3) == 1);
  CHECK(g.floor_index(2.0) == 8);
}

TEST_CASE("views never read the future") {
  const auto d = assemble_discretization(M_PI, 6);
  const Path x = ramp(d);
  const PathView v(x, 4);
  CHECK(v.time() == 0.5);
  CHECK(d.norm_h(v.now()) == doctest::Approx(4.0));
  CHECK(d.norm_h(v.at(2)) == doctest::Approx(2.0));
  CHECK_THROWS_AS(v.at(5), InvalidArgument);
  // left-constant delay, clamped at 0
  CHECK(d.norm_h(v.delayed(0.3)) == doctest::Approx(1.0));
  CHECK(d.norm_h(v.delayed(0.9)) == doctest::Approx(0.0));
  CHECK(v.running_sup(d) == doctest::Approx(4.0));
}

TEST_CASE("trapezoid integrals") {
  const auto d = assemble_discretization(M_PI, 6);
  const Path x = ramp(d);
  // |x(s)|^2 = (8 s)^2; trapezoid on the grid of 1/8 over [0, 1/2].
  double expect = 0.0;
  for (int i = 0; i < 4; ++i) expect += 0.125 * 0.5 * (i * i + (i + 1) * (i + 1));
  CHECK(PathView(x, 4).integral_sq(d) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(d.norm_h(PathView(x, 4).integral()) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("stopped paths and the path metric") {
  const auto d = assemble_discretization(M_PI, 6);
  const Path x = ramp(d);
  const Path s = stop(x, 0.25);
  CHECK_FALSE(s.forcing.has_value());
  for (std::size_t i = 2; i < s.nodes(); ++i) CHECK(d.norm_h(s.at(i)) == doctest::Approx(2.0));
  CHECK(sup_norm(d, x) == doctest::Approx(8.0));
  CHECK(sup_norm(d, s) == doctest::Approx(2.0));
  // Same path, different times: |t - s| plus the frozen gap.
  CHECK(d_infty(d, 0.25, x, 0.25, s) == doctest::Approx(0.0));
  CHECK(d_infty(d, 0.5, x, 0.25, x) == doctest::Approx(0.25 + 2.0));
  CHECK(d_infty(d, 0.5, x, 0.25, x) == doctest::Approx(d_infty(d, 0.25, x, 0.5, x)));
}

TEST_CASE("value_at is left-constant") {
  const auto d = assemble_discretization(M_PI, 6);
  const Path x = ramp(d);
  CHECK(d.norm_h(x.value_at(0.3)) == doctest::Approx(2.0));
  CHECK(d.norm_h(x.value_at(0.375)) == doctest::Approx(3.0));
  const Path c = Path::constant(TimeGrid(1.0, 4), d.sine_mode(2));
  CHECK(c.nodes() == 5);
  CHECK(c.dim() == 6);
}
