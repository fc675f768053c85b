#include <cmath>
#include <limits>

#include "doctest.h"
#include "pathhj/bundle.hpp"
#include "pathhj/control.hpp"
#include "pathhj/errors.hpp"
#include "pathhj/presets.hpp"

using namespace pathhj;

namespace {

// Terminal-cost problem on one sine mode: x' - x_xx = p e_1, cost |x(T)|.
InlineProblemSpec mode_problem() {
  InlineProblemSpec s;
  s.n = 8;
  s.steps = 16;
  s.control_intervals = 4;
  s.P = {-1.0, 0.0, 0.5};
  s.control_modes = {1.0};
  s.x_star_modes = {0.8};
  s.state_weight = 0.0;
  s.terminal_weight = 1.0;
  return s;
}

}  // namespace

TEST_CASE("brute-force value against a scalar recurrence") {
  const InlineProblemSpec s = mode_problem();
  const ControlProblem pb = make_inline_problem(s);
  // On span{e_1} implicit Euler is a_{i+1} = (a_i + dt p) / (1 + lambda dt).
  const double dt = s.T / static_cast<double>(s.steps);
  const double lam = pb.disc.laplacian_eigenvalue(1);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < 81; ++code) {
    double a = 0.8;
    std::size_t c = code;
    for (int k = 0; k < 4; ++k, c /= 3) {
      for (int i = 0; i < 4; ++i) a = (a + dt * s.P[c % 3]) / (1.0 + lam * dt);
    }
    best = std::min(best, std::abs(a));
  }
  const ValueRecord v = brute_force_value(pb, 0.0, pb.initial_history());
  CHECK(v.value == doctest::Approx(best).epsilon(1e-12));
  CHECK(v.leaves == 81);
  CHECK(cost_J(pb, 0.0, pb.initial_history(), v.controls) == doctest::Approx(v.value).epsilon(1e-15));
}

TEST_CASE("frozen preset values") {
  PresetOptions o;
  o.name = "heat_control";
  o.control_intervals = 2;
  const ControlProblem two = make_preset(o);
  const ValueRecord v2 = brute_force_value(two, 0.0, two.initial_history());
  CHECK(v2.value == doctest::Approx(0.57350715736697389).epsilon(1e-12));
  CHECK(v2.controls == std::vector<std::size_t>{0, 1});
  const ControlProblem four = make_preset("heat_control");
  CHECK(brute_force_value(four, 0.0, four.initial_history()).value ==
        doctest::Approx(0.45334031874333319).epsilon(1e-12));
  const ControlProblem delay = make_preset("heat_delay");
  CHECK(brute_force_value(delay, 0.0, delay.initial_history()).value ==
        doctest::Approx(0.86141239635074007).epsilon(1e-12));
}

TEST_CASE("open-loop rollouts and the cost functional") {
  const ControlProblem pb = make_preset("heat_control");
  const Path x0 = pb.initial_history();
  const Rollout r = rollout_open_loop(pb, 0.0, x0, 4, {2, 0, 1, 1});
  CHECK(r.cost == doctest::Approx(r.running_cost + pb.h(PathView(r.path, pb.grid.steps))));
  CHECK(cost_J(pb, 0.0, x0, {2, 0, 1, 1}) == doctest::Approx(r.cost).epsilon(1e-15));
  CHECK(forcing_admissible(pb.disc, r.path, pb.Lf));
  // the value is a lower bound for every sequence
  CHECK(brute_force_value(pb, 0.0, x0).value <= r.cost);
}

TEST_CASE("dynamic programming at interior nodes") {
  for (const char* name : {"heat_control", "heat_delay", "bilinear_game"}) {
    const ControlProblem pb = make_preset(name);
    for (std::size_t k = 1; k < pb.control_intervals; ++k) {
      const auto r = check_dpp(pb, 0.0, pb.initial_history(), pb.control_time(k));
      CHECK_MESSAGE(r.passed, name);
      CHECK(r.gap <= 1e-10);
    }
  }
}

TEST_CASE("tree values order and reduce to the control tree") {
  const ControlProblem pb = make_preset("heat_control");
  const Path x0 = pb.initial_history();
  const double v = brute_force_value(pb, 0.0, x0).value;
  CHECK(tree_value(pb, 0.0, x0, 4, TreeOrder::controller_first).value == doctest::Approx(v).epsilon(1e-14));
  CHECK(tree_value(pb, 0.0, x0, 4, TreeOrder::disturbance_first).value == doctest::Approx(v).epsilon(1e-14));
  const ControlProblem g = make_preset("bilinear_game");
  const Path y0 = g.initial_history();
  CHECK(tree_value(g, 0.0, y0, 4, TreeOrder::disturbance_first).value <=
        tree_value(g, 0.0, y0, 4, TreeOrder::controller_first).value);
}

TEST_CASE("budgets and partitions are enforced") {
  const ControlProblem pb = make_preset("heat_control");
  CHECK_THROWS_AS(brute_force_value(pb, 0.0, pb.initial_history(), 10), BudgetExceeded);
  CHECK_THROWS_AS(pb.steps_per_interval(5), InvalidArgument);
  CHECK(pb.steps_per_interval(4) == 16);
  CHECK_THROWS_AS(brute_force_value(pb, 0.3, pb.initial_history()), InvalidArgument);
}

TEST_CASE("value regularity on bundle pairs") {
  const ControlProblem pb = make_preset("heat_control");
  const auto b = sample_bundle(pb.disc, pb.op, 0.0, pb.initial_history(), pb.Lf, 6, 11);
  std::vector<RegularitySample> samples;
  for (std::size_t i = 1; i < b.size(); ++i) {
    samples.push_back({pb.control_time(1), b.members[i], b.members[i - 1], pb.control_time(3)});
  }
  const auto r = check_value_regularity(pb, pb.Lf, samples, pb.tol_disc());
  CHECK(r.passed);
  CHECK(r.space_constant ==
        doctest::Approx(pb.Lf * (1.0 - 0.25 + 1.0) * std::exp(pb.Lf * 0.75)).epsilon(1e-12));
  CHECK(r.max_space_ratio <= 1.0);
}

TEST_CASE("inline problems validate their Lipschitz constant") {
  InlineProblemSpec s = mode_problem();
  s.delay_gain = 0.5;
  s.state_gain = -0.25;
  const double bound = inline_lipschitz_bound(s);
  CHECK(bound == doctest::Approx(1.0));
  s.Lf = 0.5 * bound;
  CHECK_THROWS_AS(make_inline_problem(s), InvalidArgument);
  s.Lf = 2.0;
  CHECK(make_inline_problem(s).Lf == 2.0);
}
