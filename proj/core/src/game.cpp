#include "pathhj/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pathhj/errors.hpp"
#include "pathhj/parallel.hpp"

namespace pathhj {
namespace {

std::size_t node_interval(const ControlProblem& problem, double t0, std::size_t intervals) {
  const std::size_t stride = problem.steps_per_interval(intervals);
  const std::size_t i0 = problem.grid.index_of(t0);
  if (i0 % stride != 0) throw InvalidArgument("t0 is not a partition node");
  return i0 / stride;
}

Path game_start(const ControlProblem& problem, const Path& x0, double t0) {
  if (!(x0.grid == problem.grid) || x0.dim() != problem.disc.n) {
    throw InvalidArgument("initial history does not match the problem grid");
  }
  Path path = x0;
  path.birth_index = problem.grid.index_of(t0);
  path.ensure_forcing();
  return path;
}

double terminal_cost(const ControlProblem& problem, const Path& path) {
  return problem.h(PathView(path, path.grid.steps));
}

void check_budget(std::size_t branching, std::size_t depth, std::size_t budget) {
  double leaves = std::pow(static_cast<double>(branching), static_cast<double>(depth));
  if (leaves > static_cast<double>(budget)) {
    throw BudgetExceeded("adversary search needs more than " + std::to_string(budget) +
                         " leaves");
  }
}

// Depth-first search over open-loop sequences of one side against a feedback
// strategy of the other; the strategy is queried once per tree node.
void adversary_dfs(const ControlProblem& problem, Path& path, std::size_t k,
                   std::size_t K, std::size_t stride, const FeedbackStrategy& s,
                   bool maximize, double acc, std::vector<std::size_t>& seq,
                   GuaranteedResult& best) {
  if (k == K) {
    const double v = acc + terminal_cost(problem, path);
    ++best.leaves;
    if (maximize ? v > best.value : v < best.value) {
      best.value = v;
      best.opponent = seq;
    }
    return;
  }
  const std::size_t fixed = s.choose(PathView(path, k * stride));
  const auto& own = s.side == Side::controller ? problem.P : problem.Q;
  const auto& other = s.side == Side::controller ? problem.Q : problem.P;
  if (fixed >= own.size()) throw InvalidArgument("strategy returned an invalid index");
  for (std::size_t j = 0; j < other.size(); ++j) {
    const double p = s.side == Side::controller ? own[fixed] : other[j];
    const double q = s.side == Side::controller ? other[j] : own[fixed];
    const double c = advance_controlled(problem, path, k * stride, (k + 1) * stride, p, q);
    seq.push_back(j);
    adversary_dfs(problem, path, k + 1, K, stride, s, maximize, acc + c, seq, best);
    seq.pop_back();
  }
}

GuaranteedResult guaranteed(const ControlProblem& problem, double t0, const Path& x0,
                            const FeedbackStrategy& s, std::size_t intervals,
                            std::size_t budget, bool maximize) {
  const std::size_t k0 = node_interval(problem, t0, intervals);
  const std::size_t stride = problem.steps_per_interval(intervals);
  const auto& other = s.side == Side::controller ? problem.Q : problem.P;
  check_budget(other.size(), intervals - k0, budget);
  GuaranteedResult best;
  best.value = maximize ? -std::numeric_limits<double>::infinity()
                        : std::numeric_limits<double>::infinity();
  Path path = game_start(problem, x0, t0);
  std::vector<std::size_t> seq;
  adversary_dfs(problem, path, k0, intervals, stride, s, maximize, 0.0, seq, best);
  return best;
}

struct Difference {
  Vec now;
  double integral_sq = 0.0;
};

// x - y on [0, t_i]: value at t_i and trapezoid integral of |x - y|^2.
Difference difference(const GelfandDiscretization& disc, const PathView& x, const Path& y) {
  const std::size_t i = x.index();
  const double dt = x.grid().dt();
  Difference d;
  double prev = 0.0;
  for (std::size_t j = 0; j <= i; ++j) {
    const Vec e = x.at(j) - y.at(j);
    const double e2 = disc.inner(e, e);
    if (j > 0) d.integral_sq += 0.5 * dt * (prev + e2);
    prev = e2;
    if (j == i) d.now = e;
  }
  return d;
}

}  // namespace

FeedbackStrategy constant_strategy(Side side, std::size_t index) {
  return {side, "constant", [index](const PathView&) { return index; }};
}

FeedbackStrategy open_loop_strategy(const ControlProblem& problem, Side side, double t0,
                                    std::size_t intervals, std::vector<std::size_t> seq) {
  const std::size_t stride = problem.steps_per_interval(intervals);
  const std::size_t k0 = node_interval(problem, t0, intervals);
  if (seq.size() != intervals - k0) throw InvalidArgument("open-loop sequence length");
  return {side, "open-loop", [stride, k0, seq = std::move(seq)](const PathView& x) {
            return seq.at(x.index() / stride - k0);
          }};
}

FeedbackStrategy tree_strategy(const ControlProblem& problem, Side side,
                               std::size_t intervals, std::size_t budget) {
  const ControlProblem* pb = &problem;
  return {side, side == Side::controller ? "tree-upper" : "tree-lower",
          [pb, side, intervals, budget](const PathView& x) {
            const TreeResult r =
                tree_value(*pb, x.time(), x.path(), intervals,
                           side == Side::controller ? TreeOrder::controller_first
                                                    : TreeOrder::disturbance_first,
                           budget);
            return side == Side::controller ? r.p_index : r.q_index;
          }};
}

GameRollout rollout(const ControlProblem& problem, double t0, const Path& x0,
                    std::size_t intervals, const FeedbackStrategy& a,
                    const FeedbackStrategy& b) {
  if (a.side != Side::controller || b.side != Side::disturbance) {
    throw InvalidArgument("rollout: strategy sides swapped");
  }
  const std::size_t k0 = node_interval(problem, t0, intervals);
  const std::size_t stride = problem.steps_per_interval(intervals);
  GameRollout out{game_start(problem, x0, t0), {}, {}, 0.0};
  for (std::size_t k = k0; k < intervals; ++k) {
    const PathView view(out.path, k * stride);
    const std::size_t i = a.choose(view);
    const std::size_t j = b.choose(view);
    if (i >= problem.P.size() || j >= problem.Q.size()) {
      throw InvalidArgument("strategy returned an invalid index");
    }
    out.p_indices.push_back(i);
    out.q_indices.push_back(j);
    out.cost += advance_controlled(problem, out.path, k * stride, (k + 1) * stride,
                                   problem.P[i], problem.Q[j]);
  }
  out.cost += terminal_cost(problem, out.path);
  return out;
}

GuaranteedResult guaranteed_result_a(const ControlProblem& problem, double t0,
                                     const Path& x0, const FeedbackStrategy& a,
                                     std::size_t intervals, std::size_t budget) {
  if (a.side != Side::controller) throw InvalidArgument("J_a needs a controller strategy");
  return guaranteed(problem, t0, x0, a, intervals, budget, true);
}

GuaranteedResult guaranteed_result_b(const ControlProblem& problem, double t0,
                                     const Path& x0, const FeedbackStrategy& b,
                                     std::size_t intervals, std::size_t budget) {
  if (b.side != Side::disturbance) throw InvalidArgument("J_b needs a disturbance strategy");
  return guaranteed(problem, t0, x0, b, intervals, budget, false);
}

double epsilon_zero(double Lf, double T, double t0) { return std::exp(-2.0 * Lf * (T - t0)); }

NuEps nu_eps_state(const GelfandDiscretization& disc, double eps, double Lf, double t0,
                   double t, const Vec& xt, double integral_sq) {
  if (!(eps > 0.0)) throw InvalidArgument("nu_eps: eps must be positive");
  const double decay = std::exp(-2.0 * Lf * (t - t0));
  NuEps out;
  const double x2 = disc.inner(xt, xt);
  out.alpha = (decay - eps) / eps;
  out.beta = std::sqrt(eps * eps * eps * eps + x2 + 2.0 * Lf * integral_sq);
  out.nu = out.alpha * out.beta;
  out.dt_nu = -2.0 * Lf * (decay / eps) * out.beta + Lf * out.alpha * x2 / out.beta;
  out.dx_nu = (out.alpha / out.beta) * xt;
  return out;
}

NuEps nu_eps(const GelfandDiscretization& disc, double eps, double Lf, double t0,
             const PathView& x) {
  const double eps0 = epsilon_zero(Lf, x.grid().T, t0);
  if (!(eps > 0.0 && eps < eps0)) {
    throw InvalidArgument("nu_eps: eps must lie in (0, " + std::to_string(eps0) + ")");
  }
  return nu_eps_state(disc, eps, Lf, t0, x.time(), x.now(), x.integral_sq(disc));
}

NuDerivativeReport check_nu_derivatives(const GelfandDiscretization& disc, double eps,
                                        double Lf, double t0,
                                        const std::vector<NuSample>& samples, int modes,
                                        double tol, double step) {
  NuDerivativeReport r;
  r.samples = samples.size();
  r.tolerance = tol;
  const auto rel = [](double fd, double declared) {
    return std::abs(fd - declared) / std::max(1.0, std::abs(declared));
  };
  for (const NuSample& s : samples) {
    const NuEps at = nu_eps_state(disc, eps, Lf, t0, s.t, s.xt, s.integral_sq);
    const double x2 = disc.inner(s.xt, s.xt);
    const double up = nu_eps_state(disc, eps, Lf, t0, s.t + step, s.xt,
                                   s.integral_sq + step * x2).nu;
    const double down = nu_eps_state(disc, eps, Lf, t0, s.t - step, s.xt,
                                     s.integral_sq - step * x2).nu;
    r.max_error_t = std::max(r.max_error_t, rel((up - down) / (2.0 * step), at.dt_nu));
    for (int k = 1; k <= modes; ++k) {
      const Vec e = disc.sine_mode(k);
      const double plus =
          nu_eps_state(disc, eps, Lf, t0, s.t, Vec(s.xt + step * e), s.integral_sq).nu;
      const double minus =
          nu_eps_state(disc, eps, Lf, t0, s.t, Vec(s.xt - step * e), s.integral_sq).nu;
      r.max_error_x = std::max(r.max_error_x,
                               rel((plus - minus) / (2.0 * step), disc.inner(e, at.dx_nu)));
    }
  }
  r.passed = r.max_error_t <= tol && r.max_error_x <= tol;
  return r;
}

ExtremalShiftState::ExtremalShiftState(const ControlProblem& problem,
                                       TrajectoryBundle bundle,
                                       ExtremalShiftOptions options)
    : problem_(&problem), bundle_(std::move(bundle)), options_(std::move(options)) {
  if (bundle_.members.empty()) throw InvalidArgument("extremal shift: empty bundle");
  problem.steps_per_interval(options_.value_intervals);
}

double ExtremalShiftState::value(const PathView& x) const {
  const std::size_t i = x.index();
  const Eigen::MatrixXd history = x.path().values.leftCols(static_cast<Eigen::Index>(i + 1));
  const std::size_t key =
      i ^ (std::hash<double>{}(history.sum()) << 1) ^ std::hash<double>{}(history.norm());
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      for (const auto& [h, v] : it->second) {
        if (h.cols() == history.cols() && h == history) return v;
      }
    }
  }
  const double v = tree_value(*problem_, x.time(), x.path(), options_.value_intervals,
                              TreeOrder::controller_first, options_.budget)
                       .value;
  std::lock_guard<std::mutex> lock(mutex_);
  cache_[key].emplace_back(history, v);
  return v;
}

double ExtremalShiftState::member_value(std::size_t member, std::size_t index) const {
  return value(PathView(bundle_.members.at(member), index));
}

double ExtremalShiftState::root_value() const {
  return value(PathView(bundle_.prefix, problem_->grid.index_of(bundle_.t0)));
}

std::size_t ExtremalShiftState::cache_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::size_t n = 0;
  for (const auto& [k, v] : cache_) n += v.size();
  return n;
}

void ExtremalShiftState::precompute() const {
  const std::size_t stride = problem_->steps_per_interval(options_.value_intervals);
  const std::size_t i0 = problem_->grid.index_of(bundle_.t0);
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t m = 0; m < bundle_.size(); ++m) {
    for (std::size_t i = i0; i < problem_->grid.steps; i += stride) jobs.emplace_back(m, i);
  }
  parallel_for(jobs.size(), [&](std::size_t j) { member_value(jobs[j].first, jobs[j].second); });
}

ModelChoice ExtremalShiftState::select_model(Side side, double eps, const PathView& x) const {
  const GelfandDiscretization& disc = problem_->disc;
  const double Lf = problem_->Lf;
  const double t = x.time();
  const auto score_of = [&](double u, const Vec& diff, double integral) {
    const double nu = nu_eps_state(disc, eps, Lf, bundle_.t0, t, diff, integral).nu;
    return side == Side::controller ? u + nu : u - nu;
  };
  const auto better = [&](double a, double b) {
    return side == Side::controller ? a < b : a > b;
  };

  ModelChoice best;
  for (std::size_t m = 0; m < bundle_.size(); ++m) {
    const Difference d = difference(disc, x, bundle_.members[m]);
    const double sc = score_of(member_value(m, x.index()), d.now, d.integral_sq);
    if (m == 0 || better(sc, best.score)) {
      best = {false, m, d.now, d.integral_sq, sc};
    }
  }

  const std::size_t i = x.index();
  if (i <= x.path().birth_index || i == 0) return best;
  // Local models share the history up to t - dt and end at x(t) - r d. The
  // forcing that produces this endpoint must respect the model growth bound.
  const double dt = x.grid().dt();
  const Vec x_prev = x.at(i - 1);
  double m_prev = 0.0;
  for (std::size_t j = 0; j < i; ++j) m_prev = std::max(m_prev, disc.norm_h(x.at(j)));
  const double bound = options_.model_growth * Lf * (1.0 + m_prev);
  
  const double alpha = nu_eps_state(disc, eps, Lf, bundle_.t0, t, Vec::Zero(disc.n), 0.0).alpha;
  Path local = x.path();
  for (int k = 1; k <= options_.local_modes; ++k) {
    const Vec e = disc.sine_mode(k);
    for (double sign : {1.0, -1.0}) {
      for (double mult : options_.local_radii) {
        const double r = mult * eps * eps / alpha;
        const Vec endpoint = x.now() - sign * r * e;
        const Vec forcing = (endpoint - x_prev) / dt +
                            apply_operator(problem_->op, disc, t, endpoint);
        if (disc.norm_h(forcing) > bound) continue;
        local.values.col(static_cast<Eigen::Index>(i)) = endpoint;
        const Vec diff = sign * r * e;
        const double integral = 0.5 * dt * r * r;
        const double sc = score_of(value(PathView(local, i)), diff, integral);
        if (better(sc, best.score)) best = {true, 0, diff, integral, sc};
      }
    }
  }
  return best;
}

FeedbackStrategy extremal_shift_strategy(const ExtremalShiftState& state, Side side,
                                         double eps) {
  const ControlProblem& problem = state.problem();
  const double eps0 = epsilon_zero(problem.Lf, problem.grid.T, state.bundle().t0);
  if (!(eps > 0.0 && eps < eps0)) {
    throw InvalidArgument("extremal shift: eps must lie in (0, " + std::to_string(eps0) + ")");
  }
  const ExtremalShiftState* s = &state;
  return {side, "extremal-shift", [s, side, eps](const PathView& x) {
            const ControlProblem& pb = s->problem();
            const ModelChoice model = s->select_model(side, eps, x);
            const NuEps nu = nu_eps_state(pb.disc, eps, pb.Lf, s->bundle().t0, x.time(),
                                          model.difference, model.integral_sq);
            if (side == Side::controller) {
              return eval_F(pb.disc, pb.hamiltonian(HamiltonianMode::isaacs_minmax), x,
                            nu.dx_nu)
                  .p_index;
            }
            return eval_F(pb.disc, pb.hamiltonian(HamiltonianMode::isaacs_maxmin), x,
                          Vec(-nu.dx_nu))
                .q_index;
          }};
}

TrajectoryBundle game_bundle(const ControlProblem& problem, double t0, const Path& x0,
                             std::size_t coarse_intervals, std::size_t value_intervals,
                             std::size_t size, std::uint64_t seed) {
  const std::size_t k0 = node_interval(problem, t0, coarse_intervals);
  const std::size_t depth = coarse_intervals - k0;
  const std::size_t np = problem.P.size();
  const std::size_t nq = problem.Q.size();
  std::vector<Path> members;
  std::vector<std::size_t> digits(depth, 0);
  while (true) {
    std::vector<std::size_t> ps(depth), qs(depth);
    for (std::size_t k = 0; k < depth; ++k) {
      ps[k] = digits[k] / nq;
      qs[k] = digits[k] % nq;
    }
    members.push_back(rollout_open_loop(problem, t0, x0, coarse_intervals, ps, qs).path);
    std::size_t pos = 0;
    while (pos < depth && ++digits[pos] == np * nq) digits[pos++] = 0;
    if (pos == depth) break;
  }
  members.push_back(rollout(problem, t0, x0, value_intervals,
                            tree_strategy(problem, Side::controller, value_intervals),
                            tree_strategy(problem, Side::disturbance, value_intervals))
                        .path);
  if (size < members.size()) throw InvalidArgument("game_bundle: size too small");
  TrajectoryBundle bundle;
  if (size > members.size()) {
    bundle = sample_bundle(problem.disc, problem.op, t0, x0, problem.Lf,
                           size - members.size(), seed, 3, problem.step_options);
  } else {
    bundle.t0 = t0;
    bundle.prefix = x0;
    bundle.L = problem.Lf;
    bundle.seed = seed;
  }
  bundle.members.insert(bundle.members.begin(), members.begin(), members.end());
  return bundle;
}

GuaranteeReport check_guarantee(const ExtremalShiftState& state,
                                const std::vector<double>& eps_list,
                                const std::vector<std::size_t>& interval_list) {
  if (eps_list.size() != interval_list.size() || eps_list.empty()) {
    throw InvalidArgument("check_guarantee: ladder lists must have equal nonzero length");
  }
  const ControlProblem& problem = state.problem();
  const double t0 = state.bundle().t0;
  const Path& x0 = state.bundle().prefix;
  state.precompute();
  const double u = state.root_value();
  GuaranteeReport report;
  report.entries.resize(eps_list.size());
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    GuaranteeEntry& e = report.entries[k];
    e.eps = eps_list[k];
    e.intervals = interval_list[k];
    e.u = u;
    e.bound_term = (1.0 - e.eps) * e.eps;
    const auto a = extremal_shift_strategy(state, Side::controller, e.eps);
    const auto b = extremal_shift_strategy(state, Side::disturbance, e.eps);
    e.J_a = guaranteed_result_a(problem, t0, x0, a, e.intervals).value;
    e.J_b = guaranteed_result_b(problem, t0, x0, b, e.intervals).value;
    e.upper_excess = e.J_a - u;
    e.lower_excess = u - e.J_b;
    e.residual = e.upper_excess - e.bound_term;
    e.bracket = e.J_b <= u && u <= e.J_a;
  }
  report.bracketing = true;
  report.residual_decreasing = true;
  for (std::size_t k = 0; k < report.entries.size(); ++k) {
    report.bracketing = report.bracketing && report.entries[k].bracket;
    if (k > 0) {
      report.residual_decreasing = report.residual_decreasing &&
                                   report.entries[k].residual <
                                       report.entries[k - 1].residual;
    }
  }
  report.passed = report.residual_decreasing;
  return report;
}

}  // namespace pathhj
