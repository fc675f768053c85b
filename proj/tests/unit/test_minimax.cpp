#include <cmath>

#include "doctest.h"
#include "pathhj/minimax.hpp"
#include "pathhj/presets.hpp"

using namespace pathhj;

namespace {

struct Fixture {
  ControlProblem pb;
  TrajectoryBundle bundle;
  std::vector<double> times;
  MinimaxInputs in;

  Fixture() {
    PresetOptions o;
    o.name = "heat_control";
    o.control_intervals = 2;
    pb = make_preset(o);
    bundle = control_bundle(pb, 0.0, pb.initial_history(), 16, 5);
    for (std::size_t k = 0; k <= pb.control_intervals; ++k) times.push_back(pb.control_time(k));
    in = minimax_inputs(pb, bundle, sample_directions(pb.disc, 2, 3, 5), times);
  }
};

}  // namespace

TEST_CASE("direction samples") {
  const auto d = assemble_discretization(M_PI, 10);
  const auto zs = sample_directions(d, 3, 5, 9);
  REQUIRE(zs.size() == 1 + 6 + 5);
  CHECK(zs[0].norm() == 0.0);
  CHECK((zs[1] - d.sine_mode(1)).norm() < 1e-15);
  CHECK((zs[2] + d.sine_mode(1)).norm() < 1e-15);
  for (const Vec& z : zs) CHECK(d.norm_h(z) <= 2.0 + 1e-12);
  CHECK(tol_mm(0.01, 2.0) == doctest::Approx(0.15));
}

TEST_CASE("control bundle starts with the constant and optimal rollouts") {
  const Fixture f;
  REQUIRE(f.bundle.size() == 16);
  const auto v = brute_force_value(f.pb, 0.0, f.pb.initial_history());
  const Rollout opt = rollout_open_loop(f.pb, 0.0, f.pb.initial_history(), 2, v.controls);
  CHECK((f.bundle.members[f.pb.P.size()].values - opt.path.values).norm() == 0.0);
}

TEST_CASE("the Bellman value is a minimax solution and its shifts fail one-sidedly") {
  const Fixture f;
  const double delta = 10.0 * f.in.tol_disc;
  const auto v = bellman_value_candidate(f.pb, 0.0);
  const auto sup = check_supersolution(v, f.in);
  const auto sub = check_subsolution(v, f.in);
  CHECK(sup.passed);
  CHECK(sub.passed);
  CHECK(sup.worst_slack <= 0.0);

  const auto lo = bellman_value_candidate(f.pb, -delta);
  const auto lo_sup = check_supersolution(lo, f.in);
  CHECK(lo_sup.inequalities_passed);
  CHECK_FALSE(lo_sup.terminal_passed);
  CHECK(check_subsolution(lo, f.in).passed);
  CHECK_FALSE(lo_sup.note.empty());

  const auto hi = bellman_value_candidate(f.pb, delta);
  const auto hi_sub = check_subsolution(hi, f.in);
  CHECK(hi_sub.inequalities_passed);
  CHECK_FALSE(hi_sub.terminal_passed);
  CHECK(check_supersolution(hi, f.in).passed);
}

TEST_CASE("infinitesimal quotients") {
  const Fixture f;
  const std::size_t st = f.pb.steps_per_interval(f.pb.control_intervals);
  const auto r = check_infinitesimal(bellman_value_candidate(f.pb, 0.0), f.in, {st, 2 * st});
  CHECK(r.super_passed);
  CHECK(r.sub_passed);
  CHECK(r.super_quotients.size() == f.in.z_samples.size());
}

TEST_CASE("comparison and stability families") {
  const Fixture f;
  const auto v = bellman_value_candidate(f.pb, 0.0);
  const auto vd = bellman_value_candidate(f.pb, 0.05);
  const auto c = empirical_comparison(v, vd, f.bundle, f.times, 1e-12);
  CHECK(c.passed);
  CHECK(c.min_gap == doctest::Approx(0.05).epsilon(1e-12));
  CHECK_FALSE(empirical_comparison(vd, v, f.bundle, f.times, 1e-12).passed);

  const auto s1 = stability_sweep(f.pb, StabilityFamily::terminal_shift, f.bundle, {0.0, 0.5}, 1e-12);
  CHECK(s1.passed);
  REQUIRE(s1.ns == std::vector<int>{1, 2, 4, 8});
  for (std::size_t k = 0; k < s1.ns.size(); ++k) {
    CHECK(s1.gaps[k] == doctest::Approx(1.0 / s1.ns[k]).epsilon(1e-12));
  }
  const auto s2 = stability_sweep(f.pb, StabilityFamily::running_scale, f.bundle, {0.0, 0.5}, 1e-12);
  CHECK(s2.passed);
  CHECK(s2.monotone);
  for (std::size_t k = 0; k < s2.ns.size(); ++k) CHECK(s2.gaps[k] <= s2.bounds[k] + 1e-12);
}
