#include <cmath>

#include "doctest.h"
#include "pathhj/errors.hpp"
#include "pathhj/game.hpp"
#include "pathhj/presets.hpp"

using namespace pathhj;

TEST_CASE("eps0") {
  CHECK(epsilon_zero(1.5, 0.5, 0.0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-15));
  CHECK(epsilon_zero(1.5, 0.5, 0.0) == doctest::Approx(0.22313016014842982));
  CHECK(epsilon_zero(1.0, 1.0, 1.0) == 1.0);
}

TEST_CASE("nu^eps closed form at the base time") {
  const auto d = assemble_discretization(M_PI, 8);
  // alpha = (1 - eps) / eps, beta = eps^2, nu = alpha beta
  const NuEps r = nu_eps_state(d, 0.1, 1.5, 0.0, 0.0, Vec::Zero(8), 0.0);
  CHECK(r.alpha == doctest::Approx(9.0));
  CHECK(r.beta == doctest::Approx(0.01));
  CHECK(r.nu == doctest::Approx(0.09));
  CHECK(r.dx_nu.norm() == 0.0);
  CHECK(r.dt_nu == doctest::Approx(-2.0 * 1.5 * 10.0 * 0.01));

  const Vec x = 0.3 * d.sine_mode(1) - 0.2 * d.sine_mode(2);
  const NuEps s = nu_eps_state(d, 0.2, 1.0, 0.0, 0.25, x, 0.05);
  const double alpha = (std::exp(-0.5) - 0.2) / 0.2;
  const double beta = std::sqrt(std::pow(0.2, 4) + 0.13 + 2.0 * 0.05);
  CHECK(s.alpha == doctest::Approx(alpha).epsilon(1e-14));
  CHECK(s.beta == doctest::Approx(beta).epsilon(1e-14));
  CHECK((s.dx_nu - (alpha / beta) * x).norm() < 1e-14);
}

TEST_CASE("nu^eps derivatives against central differences") {
  const auto d = assemble_discretization(M_PI, 8);
  std::vector<NuSample> samples;
  for (int k = 0; k < 6; ++k) {
    samples.push_back({0.05 * k, (0.1 * k - 0.2) * d.sine_mode(1) + 0.05 * k * d.sine_mode(3),
                       0.02 * k});
  }
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto r = check_nu_derivatives(d, eps, 1.5, 0.0, samples, 3);
    CHECK(r.passed);
    CHECK(r.max_error_t <= 1e-5);
    CHECK(r.max_error_x <= 1e-5);
  }
}

TEST_CASE("frozen tree values of the bilinear game") {
  const ControlProblem g = make_preset("bilinear_game");
  const Path x0 = g.initial_history();
  struct Row {
    std::size_t K;
    double upper, lower;
  };
  for (const Row& r : {Row{2, 0.35664013325507615, 0.34507133323827865},
                       Row{4, 0.24666698740897536, 0.20766396345637014},
                       Row{8, 0.18720731293148551, 0.18720731293148551}}) {
    const auto up = tree_value(g, 0.0, x0, r.K, TreeOrder::controller_first, 1u << 22);
    const auto lo = tree_value(g, 0.0, x0, r.K, TreeOrder::disturbance_first, 1u << 22);
    CHECK(up.value == doctest::Approx(r.upper).epsilon(1e-12));
    CHECK(lo.value == doctest::Approx(r.lower).epsilon(1e-12));
    CHECK(up.leaves == static_cast<std::size_t>(std::pow(4.0, static_cast<double>(r.K))));
  }
}

TEST_CASE("tree strategies guarantee the tree values") {
  const ControlProblem g = make_preset("bilinear_game");
  const Path x0 = g.initial_history();
  for (std::size_t K : {2u, 4u}) {
    const double up = tree_value(g, 0.0, x0, K, TreeOrder::controller_first).value;
    const double lo = tree_value(g, 0.0, x0, K, TreeOrder::disturbance_first).value;
    const auto a = tree_strategy(g, Side::controller, K);
    const auto b = tree_strategy(g, Side::disturbance, K);
    // an open-loop adversary of a feedback tree strategy replays the upper tree
    CHECK(guaranteed_result_a(g, 0.0, x0, a, K).value == doctest::Approx(up).epsilon(1e-12));
    CHECK(guaranteed_result_b(g, 0.0, x0, b, K).value <= up + 1e-12);
    CHECK(guaranteed_result_b(g, 0.0, x0, b, K).value >= lo - 1e-12);
  }
}

TEST_CASE("rollouts of open-loop strategies reproduce open-loop costs") {
  const ControlProblem g = make_preset("bilinear_game");
  const Path x0 = g.initial_history();
  const std::vector<std::size_t> ps{0, 1, 1, 0};
  const std::vector<std::size_t> qs{1, 1, 0, 0};
  const auto a = open_loop_strategy(g, Side::controller, 0.0, 4, ps);
  const auto b = open_loop_strategy(g, Side::disturbance, 0.0, 4, qs);
  const GameRollout r = rollout(g, 0.0, x0, 4, a, b);
  CHECK(r.p_indices == ps);
  CHECK(r.q_indices == qs);
  CHECK(r.cost == doctest::Approx(rollout_open_loop(g, 0.0, x0, 4, ps, qs).cost).epsilon(1e-14));
  const GameRollout c = rollout(g, 0.0, x0, 4, constant_strategy(Side::controller, 1),
                                constant_strategy(Side::disturbance, 0));
  CHECK(c.cost == doctest::Approx(rollout_open_loop(g, 0.0, x0, 4, {1, 1, 1, 1}, {0, 0, 0, 0}).cost));
}

TEST_CASE("guaranteed results respect the budget") {
  const ControlProblem g = make_preset("bilinear_game");
  const auto a = constant_strategy(Side::controller, 0);
  CHECK_THROWS_AS(guaranteed_result_a(g, 0.0, g.initial_history(), a, 8, 16), BudgetExceeded);
}

TEST_CASE("extremal shift on a short ladder") {
  const ControlProblem g = make_preset("bilinear_game");
  const Path x0 = g.initial_history();
  ExtremalShiftOptions opts;
  opts.value_intervals = 4;
  const auto bundle = game_bundle(g, 0.0, x0, 2, 4, 24, 3);
  CHECK(bundle.size() == 24);
  const ExtremalShiftState state(g, bundle, opts);
  CHECK(state.root_value() == doctest::Approx(0.24666698740897536).epsilon(1e-12));
  const auto rep = check_guarantee(state, {0.2, 0.1}, {2, 4});
  REQUIRE(rep.entries.size() == 2);
  for (const auto& e : rep.entries) {
    CHECK(e.bound_term == doctest::Approx((1.0 - e.eps) * e.eps));
    CHECK(e.residual == doctest::Approx(e.J_a - e.u - e.bound_term).epsilon(1e-14));
    // J_a is a max over all open-loop disturbances, so it dominates the upper value
    CHECK(e.J_a >= tree_value(g, 0.0, x0, e.intervals, TreeOrder::controller_first).value - 1e-12);
  }
  const ModelChoice m = state.select_model(Side::controller, 0.1, PathView(bundle.members[0], 0));
  CHECK_FALSE(m.local);
  CHECK(m.member == 0);
  CHECK(m.difference.norm() == 0.0);
}
