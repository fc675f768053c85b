#pragma once

// Two-player feedback games with step-by-step feedback controls: on each
// interval of a partition both players read the realized history at the
// interval's left node and hold their choice until the next node.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pathhj/bundle.hpp"
#include "pathhj/control.hpp"

namespace pathhj {

enum class Side { controller, disturbance };

/// Maps a history (t_i, x up to t_i) to an index into P (controller) or Q.
struct FeedbackStrategy {
  Side side = Side::controller;
  std::string name;
  std::function<std::size_t(const PathView&)> choose;
};

FeedbackStrategy constant_strategy(Side side, std::size_t index);
/// Plays seq[k] on the k-th interval of the `intervals`-partition after t0.
FeedbackStrategy open_loop_strategy(const ControlProblem& problem, Side side, double t0,
                                    std::size_t intervals, std::vector<std::size_t> seq);
/// First move of the alternating tree from the current history: the
/// controller plays the upper (min-max) tree, the disturbance the lower one.
FeedbackStrategy tree_strategy(const ControlProblem& problem, Side side,
                               std::size_t intervals, std::size_t budget = 1u << 20);

struct GameRollout {
  Path path;
  std::vector<std::size_t> p_indices;  ///< per partition interval
  std::vector<std::size_t> q_indices;
  double cost = 0.0;
};

GameRollout rollout(const ControlProblem& problem, double t0, const Path& x0,
                    std::size_t intervals, const FeedbackStrategy& a,
                    const FeedbackStrategy& b);

struct GuaranteedResult {
  double value = 0.0;
  std::vector<std::size_t> opponent;  ///< worst open-loop opponent sequence
  std::size_t leaves = 0;
};

/// J_a: max over open-loop disturbance sequences on the partition.
GuaranteedResult guaranteed_result_a(const ControlProblem& problem, double t0,
                                     const Path& x0, const FeedbackStrategy& a,
                                     std::size_t intervals, std::size_t budget = 4096);
/// J_b: min over open-loop controller sequences on the partition.
GuaranteedResult guaranteed_result_b(const ControlProblem& problem, double t0,
                                     const Path& x0, const FeedbackStrategy& b,
                                     std::size_t intervals, std::size_t budget = 4096);

/// e^{-2 Lf (T - t0)}.
double epsilon_zero(double Lf, double T, double t0);

struct NuEps {
  double alpha = 0.0;
  double beta = 0.0;
  double nu = 0.0;
  double dt_nu = 0.0;
  Vec dx_nu;
};

/// Closed form from x(t) and the integral I = int_0^t |x(s)|^2 ds:
///   alpha = (e^{-2Lf(t-t0)} - eps) / eps,  beta = sqrt(eps^4 + |x(t)|^2 + 2 Lf I),
///   dt_nu = -2 Lf (e^{-2Lf(t-t0)} / eps) beta + Lf alpha |x(t)|^2 / beta,
///   dx_nu = (alpha / beta) x(t).
NuEps nu_eps_state(const GelfandDiscretization& disc, double eps, double Lf, double t0,
                   double t, const Vec& xt, double integral_sq);

struct NuSample {
  double t = 0.0;
  Vec xt;
  double integral_sq = 0.0;
};

struct NuDerivativeReport {
  std::size_t samples = 0;
  double max_error_t = 0.0;  ///< |fd - declared| / max(1, |declared|)
  double max_error_x = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Central differences of nu_eps_state against dt_nu and dx_nu. The time
/// quotient moves along the stopped path, so I grows at rate |x(t)|^2; the
/// space quotient perturbs x(t) along e_1 .. e_modes with I fixed.
NuDerivativeReport check_nu_derivatives(const GelfandDiscretization& disc, double eps,
                                        double Lf, double t0,
                                        const std::vector<NuSample>& samples, int modes,
                                        double tol = 1e-5, double step = 1e-6);

/// Same with I from the trapezoid rule on the solver grid. Requires eps in (0, eps0)
/// for eps0 = epsilon_zero(Lf, T, t0).
NuEps nu_eps(const GelfandDiscretization& disc, double eps, double Lf, double t0,
             const PathView& x);

struct ExtremalShiftOptions {
  std::size_t value_intervals = 8;
  std::size_t budget = 1u << 20;
  /// Local models: the realized history with its current state displaced by
  /// r d, d = +/- e_j (j <= local_modes), r = m eps^2 / alpha(t) for m in
  /// local_radii. Near x, nu is quadratic with curvature alpha / eps^2, so a
  /// displacement m eps^2 / alpha balances a value slope of size m.
  int local_modes = 2;
  std::vector<double> local_radii{0.25, 0.5, 1.0, 2.0};
  /// Local models must be generated by forcings within L_model (1 + sup|x|),
  /// L_model = model_growth * Lf.
  double model_growth = 2.0;
};

struct ModelChoice {
  bool local = false;
  std::size_t member = 0;  ///< bundle index (local == false)
  Vec difference;          ///< x(t) - model(t)
  double integral_sq = 0.0;
  double score = 0.0;
};

/// Extremal-shift data. The game value candidate u is the upper tree value on
/// the value partition, cached by exact history and shared by every eps and
/// partition of a ladder. The model set is the bundle plus local models.
class ExtremalShiftState {
 public:
  ExtremalShiftState(const ControlProblem& problem, TrajectoryBundle bundle,
                     ExtremalShiftOptions options = {});

  const ControlProblem& problem() const { return *problem_; }
  const TrajectoryBundle& bundle() const { return bundle_; }
  const ExtremalShiftOptions& options() const { return options_; }

  /// u(t, x) for t = x.time() on the value partition.
  double value(const PathView& x) const;
  double member_value(std::size_t member, std::size_t index) const;
  double root_value() const;
  /// Fills the cache for every member at every node of the value partition.
  void precompute() const;
  std::size_t cache_size() const;

  /// argmin of u(t, m) + nu(t, x - m) over the model set (controller) or argmax
  /// of u(t, m) - nu(t, x - m) (disturbance); bundle first, lowest index on ties.
  ModelChoice select_model(Side side, double eps, const PathView& x) const;

 private:
  const ControlProblem* problem_;
  TrajectoryBundle bundle_;
  ExtremalShiftOptions options_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, std::vector<std::pair<Eigen::MatrixXd, double>>> cache_;
};

/// a^eps (controller) or b^eps (disturbance): choose the model member, then
/// min_p max_q (resp. max_q min_p) of l + (f, +/- dx_nu(t, x - model)).
FeedbackStrategy extremal_shift_strategy(const ExtremalShiftState& state, Side side,
                                         double eps);

/// Game bundle: open-loop (p, q) sequences on a coarse partition, the tree
/// saddle rollout on the value partition, then sample_bundle members.
TrajectoryBundle game_bundle(const ControlProblem& problem, double t0, const Path& x0,
                             std::size_t coarse_intervals, std::size_t value_intervals,
                             std::size_t size, std::uint64_t seed);

struct GuaranteeEntry {
  double eps = 0.0;
  std::size_t intervals = 0;
  double J_a = 0.0;
  double J_b = 0.0;
  double u = 0.0;
  double bound_term = 0.0;  ///< (1 - eps) eps
  double upper_excess = 0.0;  ///< J_a - u
  double lower_excess = 0.0;  ///< u - J_b
  double residual = 0.0;      ///< J_a - u - (1 - eps) eps
  bool bracket = false;       ///< J_b <= u <= J_a
};

struct GuaranteeReport {
  std::vector<GuaranteeEntry> entries;
  bool bracketing = false;
  bool residual_decreasing = false;
  bool passed = false;
};

/// Evaluates J_a(a^eps) and J_b(b^eps) on the ladder (eps_k, intervals_k),
/// k = 0..n-1, taken pairwise. The residual of rung k is the smallest value with
/// J_a <= u + (1 - eps) eps + residual; passed means it decreases strictly.
/// Bracketing J_b <= u <= J_a is reported per rung but not asserted.
GuaranteeReport check_guarantee(const ExtremalShiftState& state,
                                const std::vector<double>& eps_list,
                                const std::vector<std::size_t>& interval_list);

}  // namespace pathhj
