#include <cmath>
#include <limits>

#include "doctest.h"
#include "pathhj/bundle.hpp"
#include "pathhj/hamiltonian.hpp"
#include "pathhj/presets.hpp"

using namespace pathhj;

TEST_CASE("Bellman F is the minimum over P by enumeration") {
  const auto d = assemble_discretization(M_PI, 6);
  HamiltonianSpec s;
  s.P = {-1.0, 0.0, 1.0};
  s.f = [&d](const PathView&, double p, double) { return Vec(p * d.sine_mode(1)); };
  s.ell = [](const PathView& v, double p, double) { return v.now().norm() + 0.25 * p * p; };
  const Path x = Path::constant(TimeGrid(1.0, 4), d.sine_mode(2));
  const PathView v(x, 2);
  const Vec z = 0.5 * d.sine_mode(1);
  double best = std::numeric_limits<double>::infinity();
  for (double p : s.P) best = std::min(best, x.at(2).norm() + 0.25 * p * p + 0.5 * p);
  const FValue F = eval_F(d, s, v, z);
  CHECK(F.value == doctest::Approx(best).epsilon(1e-14));
  CHECK(F.p_index == 0);
  CHECK(hamiltonian_term(d, s, v, 1.0, 0.0, z) == doctest::Approx(x.at(2).norm() + 0.75));
}

TEST_CASE("ties go to the lowest index") {
  const auto d = assemble_discretization(1.0, 2);
  HamiltonianSpec s;
  s.P = {2.0, -2.0, 0.0};
  s.f = [](const PathView& v, double, double) { return Vec(Vec::Zero(v.now().size())); };
  s.ell = [](const PathView&, double p, double) { return p * p; };
  const Path x = Path::constant(TimeGrid(1.0, 1), Vec::Zero(2));
  const FValue F = eval_F(d, s, PathView(x, 0), Vec::Zero(2));
  CHECK(F.value == 0.0);
  CHECK(F.p_index == 2);
  s.ell = [](const PathView&, double, double) { return 1.0; };
  CHECK(eval_F(d, s, PathView(x, 0), Vec::Zero(2)).p_index == 0);
}

TEST_CASE("coupled bilinear example has min-max 1 and max-min -1") {
  const HamiltonianSpec up = coupled_bilinear_example();
  HamiltonianSpec lo = up;
  lo.mode = HamiltonianMode::isaacs_maxmin;
  const auto d = assemble_discretization(1.0, 1);
  const Path x = Path::constant(TimeGrid(1.0, 1), Vec::Zero(1));
  CHECK(eval_F(d, up, PathView(x, 0), Vec::Zero(1)).value == 1.0);
  CHECK(eval_F(d, lo, PathView(x, 0), Vec::Zero(1)).value == -1.0);
  const auto r = check_isaacs(d, up, {{PathView(x, 0), Vec::Zero(1)}}, 1e-12);
  CHECK(r.max_gap == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_FALSE(r.passed);
}

TEST_CASE("separable game Hamiltonian satisfies the Isaacs condition") {
  const ControlProblem pb = make_preset("bilinear_game");
  const auto b = sample_bundle(pb.disc, pb.op, 0.0, pb.initial_history(), pb.Lf, 6, 2);
  std::vector<std::pair<PathView, Vec>> states;
  for (const Path& m : b.members) {
    for (std::size_t i = 0; i < m.nodes(); i += 8) {
      states.emplace_back(PathView(m, i), pb.disc.sine_mode(1) - 0.5 * pb.disc.sine_mode(2));
      states.emplace_back(PathView(m, i), Vec::Zero(pb.disc.n));
    }
  }
  const auto r = check_isaacs(pb.disc, pb.hamiltonian(HamiltonianMode::isaacs_minmax), states);
  CHECK(r.passed);
  CHECK(r.max_gap <= 1e-12);
}

TEST_CASE("growth and Lipschitz bounds of F on the presets") {
  for (const char* name : {"heat_control", "heat_delay", "bilinear_game"}) {
    const ControlProblem pb = make_preset(name);
    const auto b = sample_bundle(pb.disc, pb.op, 0.0, pb.initial_history(), pb.Lf, 5, 4);
    const auto spec = pb.hamiltonian(HamiltonianMode::isaacs_minmax);
    std::vector<HFSample> samples;
    const Vec z1 = pb.disc.sine_mode(1);
    const Vec z2 = -0.3 * pb.disc.sine_mode(2);
    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
      for (std::size_t i = 0; i < pb.grid.nodes(); i += 16) {
        samples.push_back({&b.members[j], &b.members[j + 1], i, z1, z2});
      }
    }
    const auto r = check_HF(pb.disc, spec, pb.Lf, samples);
    CHECK_MESSAGE(r.passed, name);
  }
}
