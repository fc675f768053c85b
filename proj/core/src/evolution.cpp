#include "pathhj/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "pathhj/errors.hpp"

namespace pathhj {
namespace {

Vec residual(const GelfandDiscretization& disc, const MonotoneOperator& op,
             double t_new, const Vec& x_prev, const Vec& u, const Vec& g, double dt) {
  return (u - x_prev) / dt + apply_operator(op, disc, t_new, u) - g;
}

// Convex functional whose H-gradient is the step residual.
double step_energy(const GelfandDiscretization& disc, const MonotoneOperator& op,
                   const Vec& x_prev, const Vec& u, const Vec& g, double dt) {
  const Vec d = u - x_prev;
  return disc.inner(d, d) / (2.0 * dt) + operator_potential(op, disc, u) -
         disc.inner(g, u);
}

Vec newton_step(const GelfandDiscretization& disc, const MonotoneOperator& op,
                double t_new, const Vec& x_prev, const Vec& g, double dt,
                const StepOptions& options) {
  const double target = options.tolerance * (1.0 + disc.norm_h(g));
  Vec u = x_prev;
  Vec r = residual(disc, op, t_new, x_prev, u, g, dt);
  double rnorm = disc.norm_h(r);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (rnorm <= target) return u;
    Tridiagonal jac = operator_jacobian(op, disc, u);
    jac.diag.array() += 1.0 / dt;
    const Vec delta = -jac.solve(r);

    const double e0 = step_energy(disc, op, x_prev, u, g, dt);
    const double slope = disc.inner(r, delta);
    double alpha = 1.0;
    bool accepted = false;
    while (alpha > 1e-10) {
      const Vec trial = u + alpha * delta;
      const Vec rt = residual(disc, op, t_new, x_prev, trial, g, dt);
      const double rtn = disc.norm_h(rt);
      const double et = step_energy(disc, op, x_prev, trial, g, dt);
      // Armijo on the energy; near convergence the energy is flat to rounding,
      // so a residual decrease is accepted as well.
      if (et <= e0 + 1e-4 * alpha * slope || rtn < rnorm) {
        u = trial;
        r = rt;
        rnorm = rtn;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // Damped fixed-point fallback u <- u - rho R, rho = dt / (1 + dt Lambda).
      const Tridiagonal ja = operator_jacobian(op, disc, u);
      const double lambda =
          (ja.diag.array().abs() + ja.lower.array().abs() + ja.upper.array().abs())
              .maxCoeff();
      u -= dt / (1.0 + dt * lambda) * r;
      r = residual(disc, op, t_new, x_prev, u, g, dt);
      rnorm = disc.norm_h(r);
    }
  }
  if (rnorm <= target) return u;
  throw NumericalFailure("implicit step did not converge (residual " +
                             std::to_string(rnorm) + ")",
                         rnorm, t_new);
}

}  // namespace

Vec step(const GelfandDiscretization& disc, const MonotoneOperator& op,
         double t_new, const Vec& x_prev, const Vec& g, double dt,
         const StepOptions& options) {
  if (!(dt > 0.0)) throw InvalidArgument("step: dt must be positive");
  if (x_prev.size() != disc.n || g.size() != disc.n) {
    throw InvalidArgument("step: dimension mismatch");
  }
  switch (op.kind) {
    case OperatorKind::zero:
      return x_prev + dt * g;
    case OperatorKind::linear_laplacian: {
      const double s = 1.0 / (disc.h * disc.h);
      Tridiagonal m{Vec::Constant(disc.n, -s), Vec::Constant(disc.n, 2.0 * s + 1.0 / dt),
                    Vec::Constant(disc.n, -s)};
      return m.solve(x_prev / dt + g);
    }
    case OperatorKind::p_laplacian:
      return newton_step(disc, op, t_new, x_prev, g, dt, options);
  }
  return x_prev;
}

double step_residual(const GelfandDiscretization& disc, const MonotoneOperator& op,
                     double t_new, const Vec& x_prev, const Vec& x_new, const Vec& g,
                     double dt) {
  return disc.norm_h(residual(disc, op, t_new, x_prev, x_new, g, dt));
}

RhsSpec stored_forcing_rhs(Eigen::MatrixXd forcing) {
  RhsSpec spec;
  spec.kind = RhsSpec::Kind::stored_forcing;
  spec.eval = [forcing = std::move(forcing)](const PathView& view) -> Vec {
    return forcing.col(static_cast<Eigen::Index>(view.index()));
  };
  return spec;
}

RhsSpec feedback_rhs(RhsFunction f, double lipschitz) {
  RhsSpec spec;
  spec.kind = RhsSpec::Kind::feedback;
  spec.eval = std::move(f);
  spec.lipschitz = lipschitz;
  return spec;
}

RhsSpec delay_rhs(double tau, double gain, double distributed_gain) {
  RhsSpec spec;
  spec.kind = RhsSpec::Kind::delay_map;
  spec.concentrated_delay = tau;
  spec.distributed = distributed_gain != 0.0;
  spec.lipschitz = std::abs(gain);
  spec.eval = [tau, gain, distributed_gain](const PathView& view) -> Vec {
    Vec g = gain * view.delayed(tau);
    if (distributed_gain != 0.0) g += distributed_gain * view.integral();
    return g;
  };
  return spec;
}

void advance(const GelfandDiscretization& disc, const MonotoneOperator& op, Path& path,
             std::size_t from, std::size_t to, const RhsFunction& rhs,
             const StepOptions& options) {
  if (to > path.grid.steps || from > to) throw InvalidArgument("advance: bad range");
  Eigen::MatrixXd& forcing = path.ensure_forcing();
  const double dt = path.grid.dt();
  for (std::size_t i = from; i < to; ++i) {
    const Vec g = rhs(PathView(path, i));
    if (g.size() != disc.n) throw InvalidArgument("rhs returned wrong dimension");
    forcing.col(static_cast<Eigen::Index>(i)) = g;
    path.values.col(static_cast<Eigen::Index>(i + 1)) =
        step(disc, op, path.grid.time(i + 1), path.at(i), g, dt, options);
  }
}

Path solve_ivp(const GelfandDiscretization& disc, const MonotoneOperator& op, double t0,
               const Path& prefix, const RhsSpec& rhs, const StepOptions& options) {
  if (prefix.dim() != disc.n) throw InvalidArgument("solve_ivp: prefix dimension");
  const std::size_t i0 = prefix.grid.index_of(t0);
  Path path = prefix;
  path.birth_index = i0;
  advance(disc, op, path, i0, path.grid.steps, rhs.eval, options);
  return path;
}

AprioriConstants apriori_constants(const GelfandDiscretization& disc,
                                   const MonotoneOperator& op, double t0,
                                   const Path& prefix, double L) {
  if (!(op.c2 > 0.0)) {
    throw InvalidArgument("apriori_constants: operator is not coercive");
  }
  const double p = op.p;
  const double q = op.q;
  const double span = prefix.grid.T - t0;
  AprioriConstants c;
  c.m0 = PathView(prefix, prefix.grid.index_of(t0)).running_sup(disc);
  // c2 = eps^p C1^p / p fixes the Young splitting.
  c.epsilon = std::pow(p * op.c2, 1.0 / p) / disc.poincare_constant;
  const double K = 4.0 * std::pow(L, q) * span / (q * std::pow(c.epsilon, q));
  c.C2 = std::sqrt((c.m0 * c.m0 + K) * std::exp(K));
  c.C3 = std::pow((span * L * (1.0 + c.C2) * c.C2 + 0.5 * c.C2 * c.C2) / op.c2, 1.0 / p);
  const double a1_part = span * std::pow(op.a1, q);
  const double growth = std::pow(op.c1, q) * std::pow(c.C3, p);
  c.C4 = op.a1 > 0.0 ? std::pow(std::pow(2.0, q - 1.0) * (a1_part + growth), 1.0 / q)
                     : std::pow(growth, 1.0 / q);
  c.C5 = disc.dual_embedding_constant;
  c.C6 = c.C4 + c.C5 * std::pow(span, 1.0 / q) * (1.0 + c.C2) * L;
  c.C7 = std::sqrt(span) * L * (1.0 + c.C2);
  c.C = std::max({c.C2, c.C3, c.C4, c.C6, c.C7});
  return c;
}

double tol_disc(double kappa, double dt, double h) { return kappa * (dt + h * h); }

ContinuousDependenceReport verify_continuous_dependence(
    const GelfandDiscretization& disc, const MonotoneOperator& op, const RhsFunction& f_a,
    double Lf, double t0, const Path& x0, const Path& y0, double tolerance,
    const StepOptions& options) {
  RhsSpec rhs = feedback_rhs(f_a, Lf);
  const Path x = solve_ivp(disc, op, t0, x0, rhs, options);
  const Path y = solve_ivp(disc, op, t0, y0, rhs, options);
  const std::size_t i0 = x.grid.index_of(t0);
  ContinuousDependenceReport report;
  report.tolerance = tolerance;
  for (std::size_t j = 0; j <= i0; ++j) {
    report.initial_gap = std::max(report.initial_gap, disc.norm_h(x0.at(j) - y0.at(j)));
  }
  report.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = i0; i < x.nodes(); ++i) {
    const double t = x.grid.time(i);
    const double gap = disc.norm_h(x.at(i) - y.at(i));
    const double bound = std::exp(Lf * (t - t0)) * report.initial_gap;
    report.times.push_back(t);
    report.gaps.push_back(gap);
    report.bounds.push_back(bound);
    report.max_excess = std::max(report.max_excess, gap - bound);
    if (i > i0 && bound > 0.0) report.max_ratio = std::max(report.max_ratio, gap / bound);
  }
  report.passed = report.max_excess <= tolerance;
  return report;
}

TimeShiftReport verify_time_shift(const GelfandDiscretization& disc,
                                  const MonotoneOperator& op, const RhsFunction& f_a,
                                  double Lf, double L, const Path& x_star_path, double t0,
                                  double t1, const Path& x0, double tolerance,
                                  const StepOptions& options) {
  RhsSpec rhs = feedback_rhs(f_a, Lf);
  const Path a = solve_ivp(disc, op, t0, x0, rhs, options);
  const Path b = solve_ivp(disc, op, t1, x0, rhs, options);
  TimeShiftReport report;
  report.tolerance = tolerance;
  for (std::size_t i = 0; i < a.nodes(); ++i) {
    report.gap = std::max(report.gap, disc.norm_h(a.at(i) - b.at(i)));
  }
  const double big_l = std::max(L, Lf);
  report.constant_C = apriori_constants(disc, op, 0.0, x_star_path, big_l).C;
  report.bound = 4.0 * big_l * (1.0 + report.constant_C) * std::exp(Lf * a.grid.T) *
                 std::abs(t1 - t0);
  report.passed = report.gap <= report.bound + tolerance;
  return report;
}

}  // namespace pathhj
