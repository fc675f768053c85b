#pragma once

// Implicit Euler for x' + A(t, x) = g(t, history): the monotone operator is
// taken at the new time level, the (path-dependent) right-hand side is read
// from the history up to the old level and stored as the path's forcing.

#include <functional>
#include <optional>
#include <vector>

#include "pathhj/gelfand.hpp"
#include "pathhj/pathspace.hpp"

namespace pathhj {

struct StepOptions {
  double tolerance = 1e-10;
  int max_iterations = 200;
};

/// Solves (x_new - x_prev) / dt + A(t_new, x_new) = g. Throws NumericalFailure
/// carrying the last residual if the nonlinear solve does not converge.
Vec step(const GelfandDiscretization& disc, const MonotoneOperator& op,
         double t_new, const Vec& x_prev, const Vec& g, double dt,
         const StepOptions& options = {});

/// H-norm of (x_new - x_prev) / dt + A(x_new) - g.
double step_residual(const GelfandDiscretization& disc, const MonotoneOperator& op,
                     double t_new, const Vec& x_prev, const Vec& x_new,
                     const Vec& g, double dt);

using RhsFunction = std::function<Vec(const PathView&)>;

struct RhsSpec {
  enum class Kind { stored_forcing, feedback, delay_map };

  Kind kind = Kind::feedback;
  RhsFunction eval;
  /// Lipschitz constant in the history sup-norm, as declared by the caller.
  double lipschitz = 0.0;
  std::optional<double> concentrated_delay;
  bool distributed = false;
};

/// g_i = column i of `forcing`.
RhsSpec stored_forcing_rhs(Eigen::MatrixXd forcing);
RhsSpec feedback_rhs(RhsFunction f, double lipschitz);
/// g(t, x) = gain * x((t - tau) v 0) + distributed_gain * int_0^t x(s) ds.
RhsSpec delay_rhs(double tau, double gain, double distributed_gain = 0.0);

/// Integrates from grid index `from` to `to` in place, overwriting values and
/// forcing after `from`.
void advance(const GelfandDiscretization& disc, const MonotoneOperator& op,
             Path& path, std::size_t from, std::size_t to, const RhsFunction& rhs,
             const StepOptions& options = {});

/// Solution on [t0, T] continuing the history `prefix` (values on [0, t0] are
/// copied verbatim). The returned path stores its per-interval forcing.
Path solve_ivp(const GelfandDiscretization& disc, const MonotoneOperator& op,
               double t0, const Path& prefix, const RhsSpec& rhs,
               const StepOptions& options = {});

/// Explicit constants of the a-priori estimate for X^L(t0, x0).
struct AprioriConstants {
  double epsilon = 0.0;
  double m0 = 0.0;  ///< sup_{s <= t0} |x0(s)|
  double C2 = 0.0;  ///< sup-norm bound
  double C3 = 0.0;  ///< L^p(t0,T;V) bound
  double C4 = 0.0;  ///< L^q(t0,T;V*) bound of A x
  double C5 = 0.0;  ///< embedding H -> V*
  double C6 = 0.0;  ///< L^q(t0,T;V*) bound of x'
  double C7 = 0.0;  ///< L^2(t0,T;H) bound of f^x
  double C = 0.0;   ///< max of the above (C5 excluded)
};

AprioriConstants apriori_constants(const GelfandDiscretization& disc,
                                   const MonotoneOperator& op, double t0,
                                   const Path& prefix, double L);

/// kappa (dt + h^2): slack granted to inequalities that hold for the
/// continuous problem but are evaluated on discrete solutions.
double tol_disc(double kappa, double dt, double h);

struct ContinuousDependenceReport {
  std::vector<double> times;
  std::vector<double> gaps;
  std::vector<double> bounds;
  double initial_gap = 0.0;
  double max_excess = 0.0;        ///< max(gap - bound), tolerance not included
  double max_ratio = 0.0;         ///< max gap / bound over t > t0
  double tolerance = 0.0;
  bool passed = false;
};

/// |x(t) - y(t)| <= e^{Lf (t - t0)} sup_{s <= t0} |x0(s) - y0(s)| for the two
/// solutions driven by the same controlled right-hand side f_a.
ContinuousDependenceReport verify_continuous_dependence(
    const GelfandDiscretization& disc, const MonotoneOperator& op,
    const RhsFunction& f_a, double Lf, double t0, const Path& x0, const Path& y0,
    double tolerance, const StepOptions& options = {});

struct TimeShiftReport {
  double gap = 0.0;
  double bound = 0.0;
  double constant_C = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// ||x^{t0,x0,a} - x^{t1,x0,a}||_inf <= 4 max{L,Lf} (1 + C) e^{Lf T} |t1 - t0|,
/// with C the a-priori constant of X^{max{L,Lf}}(0, x_star).
TimeShiftReport verify_time_shift(const GelfandDiscretization& disc,
                                  const MonotoneOperator& op, const RhsFunction& f_a,
                                  double Lf, double L, const Path& x_star_path,
                                  double t0, double t1, const Path& x0,
                                  double tolerance, const StepOptions& options = {});

}  // namespace pathhj
