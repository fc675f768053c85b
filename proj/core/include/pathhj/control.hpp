#pragma once

// Optimal control of path-dependent evolution equations with piecewise-constant
// controls on a uniform control partition. The value function lives on the
// control tree rooted at (t0, x0) and is computed by exhaustive enumeration.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pathhj/evolution.hpp"
#include "pathhj/hamiltonian.hpp"

namespace pathhj {

using TerminalFn = std::function<double(const PathView&)>;

struct ControlProblem {
  std::string name;
  GelfandDiscretization disc;
  MonotoneOperator op;
  TimeGrid grid;
  std::vector<double> P;
  std::vector<double> Q{0.0};
  DynamicsFn f;
  RunningCostFn ell;
  TerminalFn h;
  double Lf = 0.0;
  /// Number of uniform control intervals on [0, T].
  std::size_t control_intervals = 1;
  /// Initial state; the default history is constant x_star on [0, t0].
  Vec x_star;
  double kappa = 0.25;
  std::optional<double> concentrated_delay;
  StepOptions step_options;

  Path initial_history() const { return Path::constant(grid, x_star); }
  /// Solver steps per interval of a uniform partition; throws unless exact.
  std::size_t steps_per_interval(std::size_t intervals) const;
  double control_time(std::size_t k) const;
  HamiltonianSpec hamiltonian(HamiltonianMode mode) const;
  double tol_disc() const { return pathhj::tol_disc(kappa, grid.dt(), disc.h); }
};

/// Integrates solver steps [from, to) with constant controls (p, q), storing the
/// forcing, and returns the left-point running cost sum dt * ell.
double advance_controlled(const ControlProblem& problem, Path& path, std::size_t from,
                          std::size_t to, double p, double q);

struct Rollout {
  Path path;
  double running_cost = 0.0;
  double cost = 0.0;  ///< running_cost + h
};

/// Open-loop controls given per interval of the `intervals`-partition, starting
/// at the interval that begins at t0. An empty q sequence means Q[0] throughout.
Rollout rollout_open_loop(const ControlProblem& problem, double t0, const Path& x0,
                          std::size_t intervals, const std::vector<std::size_t>& p_seq,
                          const std::vector<std::size_t>& q_seq = {});

/// J(t0, x0; a) for a sequence of P-indices on the control partition.
double cost_J(const ControlProblem& problem, double t0, const Path& x0,
              const std::vector<std::size_t>& a);

struct ValueRecord {
  double t0 = 0.0;
  double value = 0.0;
  std::vector<std::size_t> controls;  ///< minimizing P-indices, lowest-index ties
  std::size_t leaves = 0;
};

constexpr std::size_t kDefaultBudget = 4096;

/// Exact discrete value by enumeration of |P|^{remaining intervals} sequences.
/// Throws BudgetExceeded beyond `budget` leaves.
ValueRecord brute_force_value(const ControlProblem& problem, double t0, const Path& x0,
                              std::size_t budget = kDefaultBudget);

/// Move order on each partition interval of a two-player tree. With |Q| = 1
/// both orders reduce to the control tree.
enum class TreeOrder { controller_first, disturbance_first };

struct TreeResult {
  double value = 0.0;
  std::size_t p_index = 0;  ///< optimal first move of the controller
  std::size_t q_index = 0;  ///< optimal first move (or reply) of the disturbance
  std::size_t leaves = 0;
};

/// Value of the alternating-move tree on the uniform `intervals`-partition
/// from (t0, x0): controller_first gives min_p max_q per interval (upper
/// value), disturbance_first gives max_q min_p (lower value).
TreeResult tree_value(const ControlProblem& problem, double t0, const Path& x0,
                      std::size_t intervals, TreeOrder order,
                      std::size_t budget = kDefaultBudget);

struct DppReport {
  double t0 = 0.0;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  bool passed = false;
};

/// Both sides enumerated on the control tree. For |Q| > 1 the upper game
/// value is used and the right-hand side alternates min_p max_q up to t.
DppReport check_dpp(const ControlProblem& problem, double t0, const Path& x0, double t,
                    double tol = 1e-10);

struct RegularitySample {
  double t0 = 0.0;
  Path x0;
  Path y0;
  double t1 = 0.0;
};

struct RegularityReport {
  std::size_t samples = 0;
  double space_constant = 0.0;  ///< Lf (T - t0 + 1) e^{Lf (T - t0)} at t0 = min sample t0
  double time_constant = 0.0;
  double max_space_ratio = 0.0;
  double max_time_ratio = 0.0;
  double max_space_excess = 0.0;
  double max_time_excess = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Time constant Lf (1 + C)[1 + 4 max{L, Lf}(T + 1) e^{2 Lf T}] with C the
/// a-priori constant of X^{max{L, Lf}}(0, x_star).
double value_time_constant(const ControlProblem& problem, double L);

RegularityReport check_value_regularity(const ControlProblem& problem, double L,
                                        const std::vector<RegularitySample>& samples,
                                        double tol);

}  // namespace pathhj
