#include "pathhj/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pathhj/errors.hpp"
#include "pathhj/parallel.hpp"

namespace pathhj {

std::size_t ControlProblem::steps_per_interval(std::size_t intervals) const {
  if (intervals == 0 || grid.steps % intervals != 0) {
    throw InvalidArgument("partition with " + std::to_string(intervals) +
                          " intervals does not refine the solver grid");
  }
  return grid.steps / intervals;
}

double ControlProblem::control_time(std::size_t k) const {
  return grid.time(k * steps_per_interval(control_intervals));
}

HamiltonianSpec ControlProblem::hamiltonian(HamiltonianMode mode) const {
  HamiltonianSpec spec;
  spec.mode = mode;
  spec.P = P;
  spec.Q = Q;
  spec.f = f;
  spec.ell = ell;
  spec.L0 = Lf;
  return spec;
}

double advance_controlled(const ControlProblem& problem, Path& path, std::size_t from,
                          std::size_t to, double p, double q) {
  Eigen::MatrixXd& forcing = path.ensure_forcing();
  const double dt = path.grid.dt();
  double cost = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    const PathView view(path, i);
    const Vec g = problem.f(view, p, q);
    cost += dt * problem.ell(view, p, q);
    forcing.col(static_cast<Eigen::Index>(i)) = g;
    path.values.col(static_cast<Eigen::Index>(i + 1)) =
        step(problem.disc, problem.op, path.grid.time(i + 1), path.at(i), g, dt,
             problem.step_options);
  }
  return cost;
}

namespace {

std::size_t first_interval(const ControlProblem& problem, double t0,
                           std::size_t intervals) {
  const std::size_t stride = problem.steps_per_interval(intervals);
  const std::size_t i0 = problem.grid.index_of(t0);
  if (i0 % stride != 0) {
    throw InvalidArgument("t0 is not a node of the control partition");
  }
  return i0 / stride;
}

Path start_path(const ControlProblem& problem, const Path& x0, double t0) {
  if (!(x0.grid == problem.grid) || x0.dim() != problem.disc.n) {
    throw InvalidArgument("initial history does not match the problem grid");
  }
  Path path = x0;
  path.birth_index = problem.grid.index_of(t0);
  path.ensure_forcing();
  return path;
}

double terminal(const ControlProblem& problem, const Path& path) {
  return problem.h(PathView(path, path.grid.steps));
}

std::size_t checked_leaves(std::size_t branching, std::size_t depth, std::size_t budget) {
  std::size_t leaves = 1;
  for (std::size_t d = 0; d < depth; ++d) {
    if (leaves > budget / std::max<std::size_t>(branching, 1)) {
      throw BudgetExceeded("enumeration needs more than " + std::to_string(budget) +
                           " leaves");
    }
    leaves *= branching;
  }
  if (leaves > budget) {
    throw BudgetExceeded("enumeration needs more than " + std::to_string(budget) + " leaves");
  }
  return leaves;
}

struct Best {
  double value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> controls;
};

// In-place depth-first search: columns up to the current node are never
// touched by deeper levels, so one buffer serves the whole subtree.
void dfs(const ControlProblem& problem, Path& path, std::size_t k, std::size_t K,
         std::size_t stride, double acc, std::vector<std::size_t>& seq, Best& best) {
  if (k == K) {
    const double v = acc + terminal(problem, path);
    if (v < best.value) {
      best.value = v;
      best.controls = seq;
    }
    return;
  }
  for (std::size_t j = 0; j < problem.P.size(); ++j) {
    const double c =
        advance_controlled(problem, path, k * stride, (k + 1) * stride, problem.P[j],
                           problem.Q[0]);
    seq.push_back(j);
    dfs(problem, path, k + 1, K, stride, acc + c, seq, best);
    seq.pop_back();
  }
}

}  // namespace

Rollout rollout_open_loop(const ControlProblem& problem, double t0, const Path& x0,
                          std::size_t intervals, const std::vector<std::size_t>& p_seq,
                          const std::vector<std::size_t>& q_seq) {
  const std::size_t k0 = first_interval(problem, t0, intervals);
  const std::size_t stride = problem.steps_per_interval(intervals);
  const std::size_t count = intervals - k0;
  if (p_seq.size() != count || (!q_seq.empty() && q_seq.size() != count)) {
    throw InvalidArgument("control sequence length does not match the partition");
  }
  Rollout out{start_path(problem, x0, t0), 0.0, 0.0};
  for (std::size_t k = 0; k < count; ++k) {
    if (p_seq[k] >= problem.P.size() || (!q_seq.empty() && q_seq[k] >= problem.Q.size())) {
      throw InvalidArgument("control index out of range");
    }
    const double q = q_seq.empty() ? problem.Q[0] : problem.Q[q_seq[k]];
    out.running_cost += advance_controlled(problem, out.path, (k0 + k) * stride,
                                           (k0 + k + 1) * stride, problem.P[p_seq[k]], q);
  }
  out.cost = out.running_cost + terminal(problem, out.path);
  return out;
}

double cost_J(const ControlProblem& problem, double t0, const Path& x0,
              const std::vector<std::size_t>& a) {
  return rollout_open_loop(problem, t0, x0, problem.control_intervals, a).cost;
}

ValueRecord brute_force_value(const ControlProblem& problem, double t0, const Path& x0,
                              std::size_t budget) {
  if (problem.P.empty()) throw InvalidArgument("empty control set");
  const std::size_t K = problem.control_intervals;
  const std::size_t k0 = first_interval(problem, t0, K);
  const std::size_t stride = problem.steps_per_interval(K);
  ValueRecord record;
  record.t0 = t0;
  record.leaves = checked_leaves(problem.P.size(), K - k0, budget);
  Path root = start_path(problem, x0, t0);
  if (k0 == K) {
    record.value = terminal(problem, root);
    return record;
  }
  // Subtrees under distinct first moves are independent; reduce in index order.
  const std::size_t np = problem.P.size();
  std::vector<Best> results(np);
  parallel_for(np, [&](std::size_t j) {
    Path path = root;
    const double c = advance_controlled(problem, path, k0 * stride, (k0 + 1) * stride,
                                        problem.P[j], problem.Q[0]);
    std::vector<std::size_t> seq{j};
    dfs(problem, path, k0 + 1, K, stride, c, seq, results[j]);
  });
  Best best;
  for (auto& r : results) {
    if (r.value < best.value) best = std::move(r);
  }
  record.value = best.value;
  record.controls = std::move(best.controls);
  return record;
}

namespace {

using Leaf = std::function<double(const Path&)>;

// Alternating search over intervals [k, K) of the partition, in place.
double alternate(const ControlProblem& problem, Path& path, std::size_t k, std::size_t K,
                 std::size_t stride, TreeOrder order, const Leaf& leaf,
                 std::size_t* best_p = nullptr, std::size_t* best_q = nullptr) {
  if (k == K) return leaf(path);
  const std::size_t np = problem.P.size();
  const std::size_t nq = problem.Q.size();
  const auto payoff = [&](std::size_t i, std::size_t j) {
    const double c = advance_controlled(problem, path, k * stride, (k + 1) * stride,
                                        problem.P[i], problem.Q[j]);
    return c + alternate(problem, path, k + 1, K, stride, order, leaf);
  };
  std::vector<double> table(np * nq);
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < nq; ++j) table[i * nq + j] = payoff(i, j);
  }
  double value;
  std::size_t pi = 0, qj = 0;
  if (order == TreeOrder::controller_first) {
    value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < np; ++i) {
      std::size_t jb = 0;
      for (std::size_t j = 1; j < nq; ++j) {
        if (table[i * nq + j] > table[i * nq + jb]) jb = j;
      }
      if (table[i * nq + jb] < value) {
        value = table[i * nq + jb];
        pi = i;
        qj = jb;
      }
    }
  } else {
    value = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nq; ++j) {
      std::size_t ib = 0;
      for (std::size_t i = 1; i < np; ++i) {
        if (table[i * nq + j] < table[ib * nq + j]) ib = i;
      }
      if (table[ib * nq + j] > value) {
        value = table[ib * nq + j];
        pi = ib;
        qj = j;
      }
    }
  }
  if (best_p) *best_p = pi;
  if (best_q) *best_q = qj;
  return value;
}

}  // namespace

TreeResult tree_value(const ControlProblem& problem, double t0, const Path& x0,
                      std::size_t intervals, TreeOrder order, std::size_t budget) {
  if (problem.P.empty() || problem.Q.empty()) throw InvalidArgument("empty control set");
  const std::size_t k0 = first_interval(problem, t0, intervals);
  const std::size_t stride = problem.steps_per_interval(intervals);
  TreeResult result;
  result.leaves =
      checked_leaves(problem.P.size() * problem.Q.size(), intervals - k0, budget);
  Path path = start_path(problem, x0, t0);
  const Leaf leaf = [&problem](const Path& p) { return terminal(problem, p); };
  result.value = alternate(problem, path, k0, intervals, stride, order, leaf,
                           &result.p_index, &result.q_index);
  return result;
}

DppReport check_dpp(const ControlProblem& problem, double t0, const Path& x0, double t,
                    double tol) {
  const std::size_t K = problem.control_intervals;
  const std::size_t k0 = first_interval(problem, t0, K);
  const std::size_t k1 = first_interval(problem, t, K);
  if (k1 < k0) throw InvalidArgument("check_dpp: t < t0");
  const std::size_t stride = problem.steps_per_interval(K);
  const bool game = problem.Q.size() > 1;
  DppReport report;
  report.t0 = t0;
  report.t = t;
  report.lhs = game ? tree_value(problem, t0, x0, K, TreeOrder::controller_first).value
                    : brute_force_value(problem, t0, x0).value;

  checked_leaves(problem.P.size() * problem.Q.size(), k1 - k0, kDefaultBudget);
  const Leaf continuation = [&](const Path& p) {
    return game ? tree_value(problem, t, p, K, TreeOrder::controller_first).value
                : brute_force_value(problem, t, p).value;
  };
  Path path = start_path(problem, x0, t0);
  report.rhs = alternate(problem, path, k0, k1, stride, TreeOrder::controller_first,
                         continuation);
  report.gap = std::abs(report.lhs - report.rhs);
  report.passed = report.gap <= tol;
  return report;
}

double value_time_constant(const ControlProblem& problem, double L) {
  const double big_l = std::max(L, problem.Lf);
  const double C =
      apriori_constants(problem.disc, problem.op, 0.0, problem.initial_history(), big_l).C;
  const double T = problem.grid.T;
  return problem.Lf * (1.0 + C) *
         (1.0 + 4.0 * big_l * (T + 1.0) * std::exp(2.0 * problem.Lf * T));
}

RegularityReport check_value_regularity(const ControlProblem& problem, double L,
                                        const std::vector<RegularitySample>& samples,
                                        double tol) {
  RegularityReport report;
  report.tolerance = tol;
  report.time_constant = value_time_constant(problem, L);
  report.max_space_excess = -std::numeric_limits<double>::infinity();
  report.max_time_excess = -std::numeric_limits<double>::infinity();
  const double T = problem.grid.T;
  const double Lf = problem.Lf;
  for (const RegularitySample& s : samples) {
    const double vx = brute_force_value(problem, s.t0, s.x0).value;
    const double vy = brute_force_value(problem, s.t0, s.y0).value;
    const std::size_t i0 = problem.grid.index_of(s.t0);
    double gap = 0.0;
    for (std::size_t j = 0; j <= i0; ++j) {
      gap = std::max(gap, problem.disc.norm_h(s.x0.at(j) - s.y0.at(j)));
    }
    const double ks = Lf * (T - s.t0 + 1.0) * std::exp(Lf * (T - s.t0));
    report.space_constant = std::max(report.space_constant, ks);
    const double dv = std::abs(vx - vy);
    report.max_space_excess = std::max(report.max_space_excess, dv - ks * gap);
    if (gap > 0.0) report.max_space_ratio = std::max(report.max_space_ratio, dv / gap);

    const double vt = brute_force_value(problem, s.t1, s.x0).value;
    const double dtime = std::abs(s.t1 - s.t0);
    const double dvt = std::abs(vx - vt);
    report.max_time_excess =
        std::max(report.max_time_excess, dvt - report.time_constant * dtime);
    if (dtime > 0.0) report.max_time_ratio = std::max(report.max_time_ratio, dvt / dtime);
    ++report.samples;
  }
  if (samples.empty()) report.max_space_excess = report.max_time_excess = 0.0;
  report.passed = report.max_space_excess <= tol && report.max_time_excess <= tol;
  return report;
}

}  // namespace pathhj
