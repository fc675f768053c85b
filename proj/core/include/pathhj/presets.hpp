#pragma once

// Named problem instances shipped with the laboratory.
//
//   heat_control   x' - x_xx = p b,                  l = |x(t)| + 0.1|p|, h = |x(T)|
//   heat_delay     x' - x_xx = 0.5 x(t - tau) + p b, l = |x(t - tau)| + 0.1|p|
//   plaplace       x' - (|x_x|^2 x_x)_x = 0,         l = |x(t)|, uncontrolled
//   bilinear_game  x' - x_xx = p b1 + q b2,          l = |x(t)| + 0.05 p - 0.05 q

#include <string>
#include <vector>

#include "pathhj/control.hpp"

namespace pathhj {

struct PresetOptions {
  std::string name = "heat_control";
  double domain_length = 0.0;  ///< 0: preset default
  int n = 0;
  double T = 0.0;
  std::size_t steps = 0;
  std::size_t control_intervals = 0;
  double Lf = 0.0;
  double kappa = 0.25;
  double tau = 0.25;
  double p_exponent = 4.0;
};

/// Separable problems described by coefficients, for configs without a preset:
///   f = a x(t) + b x(t - tau) + p c + q d,
///   l = w_x |x(t)| + w_d |x(t - tau)| + w_p p + v_p |p| + w_q q + v_q |q|,
///   h = w_T |x(T)|,
/// where c, d and x_star are given by coefficients on the sine modes e_1, e_2, ...
struct InlineProblemSpec {
  std::string name = "inline";
  double domain_length = 3.141592653589793;
  int n = 16;
  double T = 1.0;
  std::size_t steps = 64;
  std::size_t control_intervals = 4;
  OperatorKind op_kind = OperatorKind::linear_laplacian;
  double p_exponent = 2.0;
  std::vector<double> P{0.0};
  std::vector<double> Q{0.0};
  std::vector<double> control_modes;
  std::vector<double> disturbance_modes;
  std::vector<double> x_star_modes{1.0};
  double state_gain = 0.0;
  double delay_gain = 0.0;
  double tau = 0.25;
  double state_weight = 1.0;
  double delay_weight = 0.0;
  double p_weight = 0.0;
  double p_abs_weight = 0.0;
  double q_weight = 0.0;
  double q_abs_weight = 0.0;
  double terminal_weight = 1.0;
  double Lf = 0.0;  ///< 0: the smallest constant the coefficients admit
  double kappa = 0.25;
};

/// Smallest Lf for which f, l and h satisfy the growth and Lipschitz bounds.
double inline_lipschitz_bound(const InlineProblemSpec& spec);

/// Throws InvalidArgument if a declared Lf is below inline_lipschitz_bound.
ControlProblem make_inline_problem(const InlineProblemSpec& spec);

std::vector<std::string> preset_names();

/// Builds a preset; zero-valued options take the preset defaults.
ControlProblem make_preset(const PresetOptions& options);
ControlProblem make_preset(const std::string& name);

}  // namespace pathhj
