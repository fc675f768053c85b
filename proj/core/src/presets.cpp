#include "pathhj/presets.hpp"

#include <algorithm>
#include <cmath>

#include "pathhj/errors.hpp"

namespace pathhj {
namespace {

struct Defaults {
  double domain_length;
  int n;
  double T;
  std::size_t steps;
  std::size_t control_intervals;
  double Lf;
};

Defaults defaults_for(const std::string& name) {
  if (name == "heat_control") return {M_PI, 16, 1.0, 64, 4, 1.5};
  if (name == "heat_delay") return {M_PI, 16, 1.0, 64, 4, 1.5};
  if (name == "plaplace") return {M_PI, 16, 1.0, 64, 4, 1.5};
  if (name == "bilinear_game") return {M_PI, 8, 0.5, 32, 4, 1.5};
  throw InvalidArgument("unknown preset '" + name + "'");
}

template <class T>
T pick(T value, T fallback) {
  return value > T{} ? value : fallback;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"heat_control", "heat_delay", "plaplace", "bilinear_game"};
}

ControlProblem make_preset(const std::string& name) {
  PresetOptions options;
  options.name = name;
  return make_preset(options);
}

ControlProblem make_preset(const PresetOptions& options) {
  const Defaults d = defaults_for(options.name);
  ControlProblem problem;
  problem.name = options.name;
  problem.disc = assemble_discretization(pick(options.domain_length, d.domain_length),
                                         pick(options.n, d.n));
  problem.grid = TimeGrid(pick(options.T, d.T), pick(options.steps, d.steps));
  problem.control_intervals = pick(options.control_intervals, d.control_intervals);
  problem.steps_per_interval(problem.control_intervals);
  problem.Lf = pick(options.Lf, d.Lf);
  problem.kappa = options.kappa;

  const GelfandDiscretization& disc = problem.disc;
  const Vec e1 = disc.sine_mode(1);
  const Vec e2 = disc.sine_mode(2);
  const TerminalFn norm_at_T = [disc](const PathView& x) { return disc.norm_h(x.now()); };

  if (options.name == "heat_control") {
    problem.op = make_operator(OperatorKind::linear_laplacian, 2.0, disc);
    problem.P = {-1.0, 0.0, 1.0};
    problem.x_star = e1 + 0.3 * e2;
    problem.f = [e1](const PathView&, double p, double) -> Vec { return p * e1; };
    problem.ell = [disc](const PathView& x, double p, double) {
      return disc.norm_h(x.now()) + 0.1 * std::abs(p);
    };
    problem.h = norm_at_T;
  } else if (options.name == "heat_delay") {
    const double tau = options.tau;
    problem.op = make_operator(OperatorKind::linear_laplacian, 2.0, disc);
    problem.P = {-1.0, 0.0, 1.0};
    problem.x_star = e1 + 0.3 * e2;
    problem.concentrated_delay = tau;
    problem.f = [e1, tau](const PathView& x, double p, double) -> Vec {
      return 0.5 * x.delayed(tau) + p * e1;
    };
    problem.ell = [disc, tau](const PathView& x, double p, double) {
      return disc.norm_h(x.delayed(tau)) + 0.1 * std::abs(p);
    };
    problem.h = norm_at_T;
  } else if (options.name == "plaplace") {
    problem.op = make_operator(OperatorKind::p_laplacian, options.p_exponent, disc);
    problem.P = {0.0};
    problem.x_star = e1 + 0.3 * e2;
    problem.f = [n = disc.n](const PathView&, double, double) -> Vec { return Vec::Zero(n); };
    problem.ell = [disc](const PathView& x, double, double) { return disc.norm_h(x.now()); };
    problem.h = norm_at_T;
  } else {
    problem.op = make_operator(OperatorKind::linear_laplacian, 2.0, disc);
    problem.P = {-1.0, 1.0};
    problem.Q = {-1.0, 1.0};
    problem.x_star = 0.5 * e1;
    const Vec b2 = 0.4 * e1 + 0.3 * e2;
    problem.f = [e1, b2](const PathView&, double p, double q) -> Vec {
      return p * e1 + q * b2;
    };
    problem.ell = [disc](const PathView& x, double p, double q) {
      return disc.norm_h(x.now()) + 0.05 * p - 0.05 * q;
    };
    problem.h = norm_at_T;
  }
  return problem;
}

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Vec mode_combination(const GelfandDiscretization& disc, const std::vector<double>& coeffs) {
  if (coeffs.size() > static_cast<std::size_t>(disc.n)) {
    throw InvalidArgument("inline problem: more mode coefficients than grid points");
  }
  Vec v = Vec::Zero(disc.n);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    v += coeffs[k] * disc.sine_mode(static_cast<int>(k + 1));
  }
  return v;
}

double euclid(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double inline_lipschitz_bound(const InlineProblemSpec& s) {
  const double pmax = max_abs(s.P);
  const double qmax = max_abs(s.Q);
  // The sine modes are H-orthonormal, so |sum c_k e_k| is the euclidean norm.
  const double state = std::abs(s.state_gain) + std::abs(s.delay_gain);
  const double forcing = pmax * euclid(s.control_modes) + qmax * euclid(s.disturbance_modes);
  const double cost_state = std::abs(s.state_weight) + std::abs(s.delay_weight);
  const double cost_control = pmax * (std::abs(s.p_weight) + std::abs(s.p_abs_weight)) +
                              qmax * (std::abs(s.q_weight) + std::abs(s.q_abs_weight));
  return std::max({state, forcing, cost_state, cost_control, std::abs(s.terminal_weight)});
}

ControlProblem make_inline_problem(const InlineProblemSpec& s) {
  if (s.P.empty() || s.Q.empty()) throw InvalidArgument("inline problem: empty control set");
  if (s.tau < 0.0) throw InvalidArgument("inline problem: negative delay");
  const double bound = inline_lipschitz_bound(s);
  if (s.Lf > 0.0 && s.Lf < bound) {
    throw InvalidArgument("inline problem: declared Lf " + std::to_string(s.Lf) +
                          " is below the admissible bound " + std::to_string(bound));
  }
  ControlProblem problem;
  problem.name = s.name;
  problem.disc = assemble_discretization(s.domain_length, s.n);
  problem.grid = TimeGrid(s.T, s.steps);
  problem.control_intervals = s.control_intervals;
  problem.steps_per_interval(problem.control_intervals);
  problem.Lf = s.Lf > 0.0 ? s.Lf : bound;
  problem.kappa = s.kappa;
  problem.op = make_operator(s.op_kind, s.p_exponent, problem.disc);
  problem.P = s.P;
  problem.Q = s.Q;
  const GelfandDiscretization& disc = problem.disc;
  problem.x_star = mode_combination(disc, s.x_star_modes);
  const Vec c = mode_combination(disc, s.control_modes);
  const Vec d = mode_combination(disc, s.disturbance_modes);
  const bool delayed = s.delay_gain != 0.0 || s.delay_weight != 0.0;
  if (delayed) problem.concentrated_delay = s.tau;
  problem.f = [s, c, d](const PathView& x, double p, double q) -> Vec {
    Vec out = p * c + q * d;
    if (s.state_gain != 0.0) out += s.state_gain * x.now();
    if (s.delay_gain != 0.0) out += s.delay_gain * x.delayed(s.tau);
    return out;
  };
  problem.ell = [s, disc](const PathView& x, double p, double q) {
    double out = s.state_weight * disc.norm_h(x.now()) + s.p_weight * p +
                 s.p_abs_weight * std::abs(p) + s.q_weight * q + s.q_abs_weight * std::abs(q);
    if (s.delay_weight != 0.0) out += s.delay_weight * disc.norm_h(x.delayed(s.tau));
    return out;
  };
  problem.h = [w = s.terminal_weight, disc](const PathView& x) {
    return w * disc.norm_h(x.now());
  };
  return problem;
}

}  // namespace pathhj
