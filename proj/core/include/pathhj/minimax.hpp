#pragma once

// Checkers for the minimax sub/supersolution inequalities. The existential
// quantifier over X^L is replaced by the members of a bundle, so a pass is a
// certificate (a witness was found) while a failure only means that no witness
// was found among the members.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pathhj/bundle.hpp"
#include "pathhj/control.hpp"

namespace pathhj {

/// u(t, x) with t = view.time(); must read x only up to t.
using Functional = std::function<double(const PathView&)>;

struct CandidateFunctional {
  std::string name;
  Functional u;
  double L = 0.0;
};

/// v(t, x) by brute force on the problem's control tree.
CandidateFunctional bellman_value_candidate(const ControlProblem& problem,
                                            double shift = 0.0);

struct MinimaxInputs {
  const GelfandDiscretization* disc = nullptr;
  HamiltonianSpec spec;
  TerminalFn h;
  const TrajectoryBundle* bundle = nullptr;
  std::vector<Vec> z_samples;
  std::vector<double> t_samples;
  double tol_disc = 0.0;
};

/// Convenience: wires disc, Bellman (or upper Isaacs) spec, h and tol_disc.
MinimaxInputs minimax_inputs(const ControlProblem& problem, const TrajectoryBundle& bundle,
                             std::vector<Vec> z_samples, std::vector<double> t_samples);

/// 5 tol_disc (1 + |z|).
double tol_mm(double tol_disc, double z_norm);

struct MinimaxEntry {
  std::size_t z_index = 0;
  double t = 0.0;
  double best_slack = 0.0;  ///< best witness value minus allowed tolerance
  std::size_t witness = 0;
  bool passed = false;
};

struct MinimaxReport {
  std::string side;
  std::vector<MinimaxEntry> entries;
  double worst_slack = 0.0;
  double terminal_min_slack = 0.0;
  bool inequalities_passed = false;
  bool terminal_passed = false;
  bool passed = false;
  /// Failures are bundle-relative: "no witness found", never a disproof.
  std::string note;
};

MinimaxReport check_supersolution(const CandidateFunctional& u, const MinimaxInputs& in);
MinimaxReport check_subsolution(const CandidateFunctional& u, const MinimaxInputs& in);

struct InfinitesimalReport {
  std::vector<std::size_t> delta_steps;
  /// quotients[z][d]: min (super) or max (sub) over members.
  std::vector<std::vector<double>> super_quotients;
  std::vector<std::vector<double>> sub_quotients;
  bool super_passed = false;
  bool sub_passed = false;
};

/// Forward difference quotients at the bundle root for delta = each entry of
/// delta_steps solver steps (clamped to T); pass decided on the smallest delta.
InfinitesimalReport check_infinitesimal(const CandidateFunctional& u,
                                        const MinimaxInputs& in,
                                        const std::vector<std::size_t>& delta_steps);

struct ComparisonReport {
  std::size_t samples = 0;
  double max_excess = 0.0;  ///< max u_sub - u_super
  double min_gap = 0.0;     ///< min u_super - u_sub
  bool passed = false;
};

ComparisonReport empirical_comparison(const CandidateFunctional& u_sub,
                                      const CandidateFunctional& u_super,
                                      const TrajectoryBundle& bundle,
                                      const std::vector<double>& times, double tol);

enum class StabilityFamily { terminal_shift, running_scale };

struct StabilityReport {
  StabilityFamily family = StabilityFamily::terminal_shift;
  std::vector<int> ns;
  std::vector<double> gaps;
  std::vector<double> bounds;
  bool monotone = false;
  bool passed = false;
};

/// h_n = h + 1/n (gap must equal 1/n) or l_n = (1 + 1/n) l (gap bounded by
/// (1/n) * running cost of the optimal control of v), for n in {1, 2, 4, 8},
/// over states (t, member) for the given times and members.
StabilityReport stability_sweep(const ControlProblem& problem, StabilityFamily family,
                                const TrajectoryBundle& bundle,
                                const std::vector<double>& times, double tol);

/// Members: constant-control rollouts for each p, the optimal rollout of the
/// control tree, then sample_bundle members up to `size`.
TrajectoryBundle control_bundle(const ControlProblem& problem, double t0, const Path& x0,
                                std::size_t size, std::uint64_t seed, int modes = 3);

/// {0, +/- e_1..e_k, `random` random vectors in span{e_1..e_k} with |z| <= 2}.
std::vector<Vec> sample_directions(const GelfandDiscretization& disc, int k,
                                   std::size_t random, std::uint64_t seed);

}  // namespace pathhj
