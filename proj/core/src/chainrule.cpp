#include "pathhj/chainrule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pathhj/errors.hpp"
#include "pathhj/game.hpp"

namespace pathhj {

namespace {

double left_point_integral(const GelfandDiscretization& disc, const PathView& x,
                           std::size_t from) {
  const double dt = x.grid().dt();
  double sum = 0.0;
  for (std::size_t j = from; j < x.index(); ++j) {
    const Vec v = x.at(j);
    sum += dt * disc.inner(v, v);
  }
  return sum;
}

void require_dynamics(const Path& x, std::size_t from, const char* who) {
  if (!x.forcing) throw InvalidArgument(std::string(who) + ": path carries no forcing");
  if (from < x.birth_index) {
    throw InvalidArgument(std::string(who) + ": interval starts inside the prescribed history");
  }
}

}  // namespace

TestFunctional quadratic_plus_integral(const GelfandDiscretization& disc, RunningDensity psi,
                                       std::string name) {
  TestFunctional phi;
  phi.kind = TestFunctional::Kind::quadratic_plus_integral;
  phi.name = std::move(name);
  phi.value = [&disc, psi](const PathView& x) {
    const double dt = x.grid().dt();
    double running = 0.0;
    for (std::size_t j = 0; j < x.index(); ++j) running += dt * psi(x.grid().time(j), x.at(j));
    const Vec now = x.now();
    return disc.inner(now, now) + running;
  };
  phi.dt = [psi](const PathView& x) { return psi(x.time(), x.now()); };
  phi.dx = [](const PathView& x) { return Vec(2.0 * x.now()); };
  return phi;
}

RunningDensity weighted_square(const GelfandDiscretization& disc, double weight) {
  return [&disc, weight](double, const Vec& xi) { return weight * disc.inner(xi, xi); };
}

TestFunctional smooth_composite(const GelfandDiscretization& disc, double eps, double Lf,
                                double t0) {
  const auto state = [&disc, eps, Lf, t0](const PathView& x) {
    const std::size_t from = x.time() > t0 ? x.grid().index_of(t0) : x.index();
    return nu_eps_state(disc, eps, Lf, t0, x.time(), x.now(),
                        left_point_integral(disc, x, from));
  };
  TestFunctional phi;
  phi.kind = TestFunctional::Kind::smooth_composite;
  phi.name = "smooth_composite";
  phi.value = [state](const PathView& x) { return state(x).nu; };
  phi.dt = [state](const PathView& x) { return state(x).dt_nu; };
  phi.dx = [state](const PathView& x) { return state(x).dx_nu; };
  return phi;
}

Vec path_velocity(const GelfandDiscretization& disc, const MonotoneOperator& op,
                  const Path& x, std::size_t i) {
  if (!x.forcing) throw InvalidArgument("path_velocity: path carries no forcing");
  if (i + 1 >= x.nodes()) throw InvalidArgument("path_velocity: index out of range");
  const Eigen::Index c = static_cast<Eigen::Index>(i);
  return Vec(x.forcing->col(c)) -
         apply_operator(op, disc, x.grid.time(i + 1), x.at(i + 1));
}

PartsReport check_parts(const GelfandDiscretization& disc, const MonotoneOperator& op,
                        const Path& x, const Path& y, double t, double s) {
  if (!(x.grid == y.grid)) throw InvalidArgument("check_parts: paths on different grids");
  const std::size_t it = x.grid.index_of(t);
  const std::size_t is = x.grid.index_of(s);
  if (is < it) throw InvalidArgument("check_parts: s < t");
  require_dynamics(x, it, "check_parts");
  require_dynamics(y, it, "check_parts");
  PartsReport r;
  r.dt = x.grid.dt();
  r.lhs = disc.inner(x.at(is), y.at(is)) - disc.inner(x.at(it), y.at(it));
  for (std::size_t i = it; i < is; ++i) {
    r.rhs += r.dt * (disc.inner(path_velocity(disc, op, x, i), y.at(i)) +
                     disc.inner(path_velocity(disc, op, y, i), x.at(i)));
  }
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

ChainRuleReport check_chain_rule(const GelfandDiscretization& disc,
                                 const MonotoneOperator& op, const TestFunctional& phi,
                                 const Path& x, double t0, double t, double kappa_c) {
  const std::size_t i0 = x.grid.index_of(t0);
  const std::size_t i1 = x.grid.index_of(t);
  if (i1 < i0) throw InvalidArgument("check_chain_rule: t < t0");
  require_dynamics(x, i0, "check_chain_rule");
  ChainRuleReport r;
  r.dt = x.grid.dt();
  r.lhs = phi.value(PathView(x, i1)) - phi.value(PathView(x, i0));
  for (std::size_t i = i0; i < i1; ++i) {
    const PathView v(x, i);
    r.rhs += r.dt * (phi.dt(v) + disc.inner(path_velocity(disc, op, x, i), phi.dx(v)));
  }
  r.residual = std::abs(r.lhs - r.rhs);
  r.bound = kappa_c * r.dt;
  r.passed = r.residual <= r.bound;
  return r;
}

DerivativeLimitReport check_derivative_limits(const GelfandDiscretization& disc,
                                              const TestFunctional& phi, double t0,
                                              const Path& x0, int modes, double kappa_d) {
  const std::size_t i0 = x0.grid.index_of(t0);
  if (i0 + 1 >= x0.nodes()) throw InvalidArgument("check_derivative_limits: t0 must precede T");
  DerivativeLimitReport r;
  r.dt = x0.grid.dt();
  const PathView base(x0, i0);
  const double phi0 = phi.value(base);
  r.declared_dt = phi.dt(base);
  const Vec grad = phi.dx(base);

  const Path stopped = stop(x0, t0);
  r.quotient_dt = (phi.value(PathView(stopped, i0 + 1)) - phi0) / r.dt;
  r.max_error = std::abs(r.quotient_dt - r.declared_dt);

  Path ray = stopped;
  ray.forcing.reset();
  const Vec anchor = x0.at(i0);
  for (int k = 1; k <= modes; ++k) {
    const Vec e = disc.sine_mode(k);
    for (std::size_t j = i0 + 1; j < ray.nodes(); ++j) {
      ray.values.col(static_cast<Eigen::Index>(j)) = anchor + (ray.grid.time(j) - t0) * e;
    }
    const double declared = r.declared_dt + disc.inner(e, grad);
    const double quotient = (phi.value(PathView(ray, i0 + 1)) - phi0) / r.dt;
    r.declared_dir.push_back(declared);
    r.quotient_dir.push_back(quotient);
    r.max_error = std::max(r.max_error, std::abs(quotient - declared));
  }
  r.bound = kappa_d * r.dt;
  r.passed = r.max_error <= r.bound;
  return r;
}

OrderReport observed_order(std::vector<double> dts, std::vector<double> residuals,
                           double min_order, double exact_floor) {
  if (dts.size() != residuals.size() || dts.size() < 2) {
    throw InvalidArgument("observed_order: need at least two matching ladder entries");
  }
  OrderReport r;
  r.dts = std::move(dts);
  r.residuals = std::move(residuals);
  r.exact = std::all_of(r.residuals.begin(), r.residuals.end(),
                        [&](double v) { return v <= exact_floor; });
  r.min_order = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < r.dts.size(); ++k) {
    double order = std::numeric_limits<double>::infinity();
    if (r.residuals[k + 1] > exact_floor) {
      order = std::log(r.residuals[k] / r.residuals[k + 1]) / std::log(r.dts[k] / r.dts[k + 1]);
    }
    r.orders.push_back(order);
    r.min_order = std::min(r.min_order, order);
  }
  r.passed = r.min_order >= min_order;
  return r;
}

}  // namespace pathhj
