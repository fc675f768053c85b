#include "pathhj/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pathhj/errors.hpp"
#include "pathhj/parallel.hpp"
#include "pathhj/random.hpp"

namespace pathhj {
namespace {

const char* kBundleNote =
    "existence is searched over bundle members only; a failed entry means no "
    "witness was found in the bundle, not that none exists";

void require(const MinimaxInputs& in) {
  if (!in.disc || !in.bundle || in.bundle->members.empty() || !in.h) {
    throw InvalidArgument("minimax inputs incomplete");
  }
  for (const Path& m : in.bundle->members) {
    if (!m.forcing) throw InvalidArgument("bundle member without stored forcing");
  }
}

// int_{t0}^{t_k} [(-f^x, z) + F(s, x, z)] ds, left-point on the solver grid,
// for every k >= i0 (entry 0 belongs to i0).
std::vector<double> running_integral(const MinimaxInputs& in, const Path& x,
                                     std::size_t i0, const Vec& z) {
  const double dt = x.grid.dt();
  std::vector<double> acc(x.nodes() - i0, 0.0);
  for (std::size_t i = i0; i < x.grid.steps; ++i) {
    const PathView view(x, i);
    const double fz = in.disc->inner(x.forcing->col(static_cast<Eigen::Index>(i)), z);
    acc[i - i0 + 1] = acc[i - i0] + dt * (eval_F(*in.disc, in.spec, view, z).value - fz);
  }
  return acc;
}

// u(t, member) for every member and every requested grid index, computed once.
std::vector<std::vector<double>> u_table(const CandidateFunctional& u,
                                         const TrajectoryBundle& bundle,
                                         const std::vector<std::size_t>& indices) {
  std::vector<std::vector<double>> table(bundle.size());
  parallel_for(bundle.size(), [&](std::size_t m) {
    table[m].reserve(indices.size());
    for (std::size_t i : indices) table[m].push_back(u.u(PathView(bundle.members[m], i)));
  });
  return table;
}

MinimaxReport check_side(const CandidateFunctional& u, const MinimaxInputs& in,
                         bool super) {
  require(in);
  const TrajectoryBundle& bundle = *in.bundle;
  const TimeGrid& grid = bundle.prefix.grid;
  const std::size_t i0 = grid.index_of(bundle.t0);
  std::vector<std::size_t> indices;
  for (double t : in.t_samples) indices.push_back(grid.index_of(t));
  const auto table = u_table(u, bundle, indices);
  const double u_root = u.u(PathView(bundle.prefix, i0));

  MinimaxReport report;
  report.side = super ? "supersolution" : "subsolution";
  report.note = kBundleNote;
  report.worst_slack = -std::numeric_limits<double>::infinity();
  report.inequalities_passed = true;

  std::vector<std::vector<double>> integrals(bundle.size());
  for (std::size_t zi = 0; zi < in.z_samples.size(); ++zi) {
    const Vec& z = in.z_samples[zi];
    const double tol = tol_mm(in.tol_disc, in.disc->norm_h(z));
    parallel_for(bundle.size(), [&](std::size_t m) {
      integrals[m] = running_integral(in, bundle.members[m], i0, z);
    });
    for (std::size_t ti = 0; ti < indices.size(); ++ti) {
      if (indices[ti] < i0) throw InvalidArgument("t sample before bundle root");
      MinimaxEntry entry;
      entry.z_index = zi;
      entry.t = in.t_samples[ti];
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < bundle.size(); ++m) {
        const double lhs = table[m][ti] + integrals[m][indices[ti] - i0];
        // super: need lhs <= u_root + tol; sub: need lhs >= u_root - tol.
        const double excess = super ? lhs - u_root : u_root - lhs;
        if (excess < best) {
          best = excess;
          entry.witness = m;
        }
      }
      entry.best_slack = best - tol;
      entry.passed = entry.best_slack <= 0.0;
      report.inequalities_passed = report.inequalities_passed && entry.passed;
      report.worst_slack = std::max(report.worst_slack, entry.best_slack);
      report.entries.push_back(entry);
    }
  }

  const std::size_t iT = grid.steps;
  report.terminal_min_slack = std::numeric_limits<double>::infinity();
  for (const Path& m : bundle.members) {
    const double uT = u.u(PathView(m, iT));
    const double hT = in.h(PathView(m, iT));
    const double slack = super ? uT - hT + in.tol_disc : hT - uT + in.tol_disc;
    report.terminal_min_slack = std::min(report.terminal_min_slack, slack);
  }
  report.terminal_passed = report.terminal_min_slack >= 0.0;
  report.passed = report.inequalities_passed && report.terminal_passed;
  return report;
}

}  // namespace

double tol_mm(double tol_disc, double z_norm) { return 5.0 * tol_disc * (1.0 + z_norm); }

CandidateFunctional bellman_value_candidate(const ControlProblem& problem, double shift) {
  CandidateFunctional c;
  c.name = shift == 0.0 ? "bellman-value" : "shifted";
  c.L = problem.Lf;
  c.u = [&problem, shift](const PathView& x) {
    return brute_force_value(problem, x.time(), x.path()).value + shift;
  };
  return c;
}

MinimaxInputs minimax_inputs(const ControlProblem& problem, const TrajectoryBundle& bundle,
                             std::vector<Vec> z_samples, std::vector<double> t_samples) {
  MinimaxInputs in;
  in.disc = &problem.disc;
  in.spec = problem.hamiltonian(problem.Q.size() > 1 ? HamiltonianMode::isaacs_minmax
                                                     : HamiltonianMode::bellman);
  in.h = problem.h;
  in.bundle = &bundle;
  in.z_samples = std::move(z_samples);
  in.t_samples = std::move(t_samples);
  in.tol_disc = problem.tol_disc();
  return in;
}

MinimaxReport check_supersolution(const CandidateFunctional& u, const MinimaxInputs& in) {
  return check_side(u, in, true);
}

MinimaxReport check_subsolution(const CandidateFunctional& u, const MinimaxInputs& in) {
  return check_side(u, in, false);
}

InfinitesimalReport check_infinitesimal(const CandidateFunctional& u,
                                        const MinimaxInputs& in,
                                        const std::vector<std::size_t>& delta_steps) {
  require(in);
  if (delta_steps.empty()) throw InvalidArgument("no delta steps");
  const TrajectoryBundle& bundle = *in.bundle;
  const TimeGrid& grid = bundle.prefix.grid;
  const std::size_t i0 = grid.index_of(bundle.t0);
  InfinitesimalReport report;
  for (std::size_t d : delta_steps) {
    report.delta_steps.push_back(std::min(d, grid.steps - i0));
  }
  std::vector<std::size_t> indices;
  for (std::size_t d : report.delta_steps) indices.push_back(i0 + d);
  const auto table = u_table(u, bundle, indices);
  const double u_root = u.u(PathView(bundle.prefix, i0));

  std::size_t smallest = 0;
  for (std::size_t k = 1; k < report.delta_steps.size(); ++k) {
    if (report.delta_steps[k] < report.delta_steps[smallest]) smallest = k;
  }
  report.super_passed = report.sub_passed = true;
  for (const Vec& z : in.z_samples) {
    const double tol = tol_mm(in.tol_disc, in.disc->norm_h(z));
    std::vector<double> sup_q(indices.size(), std::numeric_limits<double>::infinity());
    std::vector<double> sub_q(indices.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t m = 0; m < bundle.size(); ++m) {
      const auto acc = running_integral(in, bundle.members[m], i0, z);
      for (std::size_t k = 0; k < indices.size(); ++k) {
        const double delta = grid.time(indices[k]) - grid.time(i0);
        if (delta <= 0.0) continue;
        const double q = (table[m][k] - u_root + acc[indices[k] - i0]) / delta;
        sup_q[k] = std::min(sup_q[k], q);
        sub_q[k] = std::max(sub_q[k], q);
      }
    }
    report.super_passed = report.super_passed && sup_q[smallest] <= tol;
    report.sub_passed = report.sub_passed && sub_q[smallest] >= -tol;
    report.super_quotients.push_back(sup_q);
    report.sub_quotients.push_back(sub_q);
  }
  return report;
}

ComparisonReport empirical_comparison(const CandidateFunctional& u_sub,
                                      const CandidateFunctional& u_super,
                                      const TrajectoryBundle& bundle,
                                      const std::vector<double>& times, double tol) {
  ComparisonReport report;
  report.max_excess = -std::numeric_limits<double>::infinity();
  report.min_gap = std::numeric_limits<double>::infinity();
  for (const Path& m : bundle.members) {
    for (double t : times) {
      const PathView view(m, m.grid.index_of(t));
      const double d = u_sub.u(view) - u_super.u(view);
      report.max_excess = std::max(report.max_excess, d);
      report.min_gap = std::min(report.min_gap, -d);
      ++report.samples;
    }
  }
  report.passed = report.max_excess <= tol;
  return report;
}

StabilityReport stability_sweep(const ControlProblem& problem, StabilityFamily family,
                                const TrajectoryBundle& bundle,
                                const std::vector<double>& times, double tol) {
  StabilityReport report;
  report.family = family;
  report.ns = {1, 2, 4, 8};
  struct State {
    double t;
    const Path* x;
    double v;
    double running;  // running cost of the minimizer of v
  };
  std::vector<State> states;
  for (const Path& m : bundle.members) {
    for (double t : times) {
      const ValueRecord r = brute_force_value(problem, t, m);
      const Rollout roll =
          rollout_open_loop(problem, t, m, problem.control_intervals, r.controls);
      states.push_back({t, &m, r.value, roll.running_cost});
    }
  }
  report.passed = true;
  for (int n : report.ns) {
    ControlProblem pn = problem;
    const double inv = 1.0 / n;
    if (family == StabilityFamily::terminal_shift) {
      pn.h = [h = problem.h, inv](const PathView& x) { return h(x) + inv; };
    } else {
      pn.ell = [ell = problem.ell, inv](const PathView& x, double p, double q) {
        return (1.0 + inv) * ell(x, p, q);
      };
    }
    double gap = 0.0;
    double bound = 0.0;
    bool ok = true;
    for (const State& s : states) {
      const double vn = brute_force_value(pn, s.t, *s.x).value;
      const double g = std::abs(vn - s.v);
      gap = std::max(gap, g);
      if (family == StabilityFamily::terminal_shift) {
        bound = inv;
        ok = ok && std::abs(g - inv) <= tol;
      } else {
        const double b = inv * s.running;
        bound = std::max(bound, b);
        ok = ok && g <= b + tol;
      }
    }
    report.gaps.push_back(gap);
    report.bounds.push_back(bound);
    report.passed = report.passed && ok;
  }
  report.monotone = true;
  for (std::size_t k = 1; k < report.gaps.size(); ++k) {
    report.monotone = report.monotone && report.gaps[k] < report.gaps[k - 1];
  }
  report.passed = report.passed && report.monotone;
  return report;
}

TrajectoryBundle control_bundle(const ControlProblem& problem, double t0, const Path& x0,
                                std::size_t size, std::uint64_t seed, int modes) {
  const std::size_t K = problem.control_intervals;
  const std::size_t k0 = problem.grid.index_of(t0) / problem.steps_per_interval(K);
  std::vector<Path> witnesses;
  for (std::size_t j = 0; j < problem.P.size(); ++j) {
    witnesses.push_back(
        rollout_open_loop(problem, t0, x0, K, std::vector<std::size_t>(K - k0, j)).path);
  }
  if (problem.Q.size() == 1) {
    const ValueRecord r = brute_force_value(problem, t0, x0);
    witnesses.push_back(rollout_open_loop(problem, t0, x0, K, r.controls).path);
  }
  if (size <= witnesses.size()) {
    throw InvalidArgument("control_bundle: size too small for the witness members");
  }
  TrajectoryBundle bundle = sample_bundle(problem.disc, problem.op, t0, x0, problem.Lf,
                                          size - witnesses.size(), seed, modes,
                                          problem.step_options);
  bundle.members.insert(bundle.members.begin(), witnesses.begin(), witnesses.end());
  return bundle;
}

std::vector<Vec> sample_directions(const GelfandDiscretization& disc, int k,
                                   std::size_t random, std::uint64_t seed) {
  std::vector<Vec> zs{Vec::Zero(disc.n)};
  for (int j = 1; j <= k; ++j) {
    zs.push_back(disc.sine_mode(j));
    zs.push_back(-disc.sine_mode(j));
  }
  std::mt19937_64 rng(seed);
  for (std::size_t r = 0; r < random; ++r) {
    Vec z = Vec::Zero(disc.n);
    double norm2 = 0.0;
    std::vector<double> c(static_cast<std::size_t>(k));
    for (auto& ci : c) {
      ci = standard_normal(rng);
      norm2 += ci * ci;
    }
    const double radius = 2.0 * uniform01(rng);
    for (int j = 0; j < k; ++j) {
      z += radius * c[static_cast<std::size_t>(j)] / std::sqrt(norm2) * disc.sine_mode(j + 1);
    }
    zs.push_back(z);
  }
  return zs;
}

}  // namespace pathhj
