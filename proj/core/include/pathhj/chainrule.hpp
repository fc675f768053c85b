#pragma once

// Discrete checks of the calculus on path space: integration by parts, the
// functional chain rule, and the limit representations of the path
// derivatives. Path velocities are reconstructed as x' = f^x - A(x) from the
// stored forcing, the same relation the implicit Euler step enforces.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pathhj/gelfand.hpp"
#include "pathhj/pathspace.hpp"

namespace pathhj {

/// A non-anticipating functional phi(t, x) with declared path derivatives.
struct TestFunctional {
  enum class Kind { quadratic_plus_integral, smooth_composite };
  Kind kind = Kind::quadratic_plus_integral;
  std::string name;
  std::function<double(const PathView&)> value;
  std::function<double(const PathView&)> dt;
  std::function<Vec(const PathView&)> dx;
};

/// psi(s, xi) for the running part of quadratic_plus_integral.
using RunningDensity = std::function<double(double, const Vec&)>;

/// |x(t)|^2 + int_0^t psi(s, x(s)) ds (left-point rule), with
/// d_t phi = psi(t, x(t)) and d_x phi = 2 x(t).
TestFunctional quadratic_plus_integral(const GelfandDiscretization& disc, RunningDensity psi,
                                       std::string name = "quadratic_plus_integral");

/// psi(s, xi) = weight |xi|^2.
RunningDensity weighted_square(const GelfandDiscretization& disc, double weight);

/// The extremal-shift functional nu^eps(t, xi(t), x(t)) with
/// xi(t) = int_{t0}^t |x(s)|^2 ds (left-point rule) and base time t0.
TestFunctional smooth_composite(const GelfandDiscretization& disc, double eps, double Lf,
                                double t0);

/// x' on [t_i, t_{i+1}): forcing_i - A(t_{i+1}, x_{i+1}). Throws if the path
/// carries no forcing.
Vec path_velocity(const GelfandDiscretization& disc, const MonotoneOperator& op,
                  const Path& x, std::size_t i);

struct PartsReport {
  double lhs = 0.0;  ///< (x(s), y(s)) - (x(t), y(t))
  double rhs = 0.0;  ///< sum dt [(x', y) + (y', x)], left point
  double residual = 0.0;
  double dt = 0.0;
};

PartsReport check_parts(const GelfandDiscretization& disc, const MonotoneOperator& op,
                        const Path& x, const Path& y, double t, double s);

struct ChainRuleReport {
  double lhs = 0.0;  ///< phi(t, x) - phi(t0, x)
  double rhs = 0.0;  ///< sum dt [d_t phi + (x', d_x phi)], left point
  double residual = 0.0;
  double dt = 0.0;
  double bound = 0.0;  ///< kappa_c dt
  bool passed = false;
};

ChainRuleReport check_chain_rule(const GelfandDiscretization& disc,
                                 const MonotoneOperator& op, const TestFunctional& phi,
                                 const Path& x, double t0, double t, double kappa_c = 10.0);

struct DerivativeLimitReport {
  double dt = 0.0;
  double declared_dt = 0.0;
  double quotient_dt = 0.0;  ///< along x0(. ^ t0)
  std::vector<double> declared_dir;  ///< d_t phi + (e_i, d_x phi)
  std::vector<double> quotient_dir;  ///< along the ray (s - t0) e_i + x0(t0)
  double max_error = 0.0;
  double bound = 0.0;  ///< kappa_d dt
  bool passed = false;
};

/// Forward quotients over one grid step of x0's grid, for e_1 .. e_modes.
DerivativeLimitReport check_derivative_limits(const GelfandDiscretization& disc,
                                              const TestFunctional& phi, double t0,
                                              const Path& x0, int modes,
                                              double kappa_d = 10.0);

/// Residuals over a dt ladder and the observed orders between neighbours.
/// Residuals at or below `exact_floor` count as exact and satisfy any order.
struct OrderReport {
  std::vector<double> dts;
  std::vector<double> residuals;
  std::vector<double> orders;
  double min_order = 0.0;
  bool exact = false;
  bool passed = false;
};

OrderReport observed_order(std::vector<double> dts, std::vector<double> residuals,
                           double min_order = 0.9, double exact_floor = 1e-12);

}  // namespace pathhj
