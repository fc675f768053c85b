#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "pathhj/bundle.hpp"
#include "pathhj/chainrule.hpp"
#include "pathhj/errors.hpp"
#include "pathhj/format.hpp"
#include "pathhj/game.hpp"
#include "pathhj/minimax.hpp"
#include "pathhj/parallel.hpp"
#include "pathhj/random.hpp"

namespace pathhj::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Check {
  std::string name;
  bool passed = false;
};

/// Collected checks and artifacts of one run.
class Run {
 public:
  Run(const ExperimentConfig& config, const RunContext& ctx) : config_(config), ctx_(ctx) {
    fs::create_directories(ctx.out_dir);
  }

  void check(const std::string& name, bool passed) { checks_.push_back({name, passed}); }

  void write_json(const std::string& file, const json& body) {
    if (!config_.output.json) return;
    write_text(file, body.dump(2) + "\n");
  }

  void write_csv(const std::string& file, const std::string& body) {
    if (!config_.output.csv) return;
    write_text(file, body);
  }

  int finish() {
    bool all = true;
    json checks = json::array();
    for (const Check& c : checks_) {
      checks.push_back({{"name", c.name}, {"passed", c.passed}});
      all = all && c.passed;
    }
    json summary = {{"command", ctx_.command}, {"passed", all}, {"checks", checks}};
    write_text("summary.json", summary.dump(2) + "\n");

    json manifest = {{"tool", "pathhj"},
                     {"version", kVersion},
                     {"command", ctx_.command},
                     {"config_hash", config_hash(config_.source)},
                     {"seeds", {{"bundle", config_.bundle.seed}}},
                     {"workers", worker_count()},
                     {"files", files_}};
    if (ctx_.timestamp) {
      const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
      char buf[32];
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
      manifest["created"] = buf;
    }
    write_text("manifest.json", manifest.dump(2) + "\n", false);
    return all ? 0 : 1;
  }

 private:
  void write_text(const std::string& file, const std::string& body, bool record = true) {
    std::ofstream out(fs::path(ctx_.out_dir) / file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + file + "' in " + ctx_.out_dir);
    out << body;
    if (record) files_.push_back(file);
  }

  const ExperimentConfig& config_;
  const RunContext& ctx_;
  std::vector<Check> checks_;
  std::vector<std::string> files_;
};

std::string num(double v) { return format_double(v); }

double bundle_L(const ExperimentConfig& c, const ControlProblem& pb) {
  return c.bundle.L > 0.0 ? c.bundle.L : pb.Lf;
}

int clamp_modes(const ExperimentConfig& c, const ControlProblem& pb) {
  return std::min(c.bundle.modes, pb.disc.n);
}

TrajectoryBundle config_bundle(const ExperimentConfig& c, const ControlProblem& pb) {
  return sample_bundle(pb.disc, pb.op, 0.0, pb.initial_history(), bundle_L(c, pb),
                       c.bundle.size, c.bundle.seed, clamp_modes(c, pb), pb.step_options);
}

Vec random_vector(const GelfandDiscretization& disc, std::mt19937_64& rng, double scale) {
  Vec v(disc.n);
  for (int i = 0; i < disc.n; ++i) v[i] = standard_normal(rng);
  return scale * v;
}

json vec_json(const std::vector<double>& v) { return json(v); }

// ---------------------------------------------------------------- operators

void suite_operators(const ExperimentConfig& c, const ControlProblem& pb, Run& run) {
  const GelfandDiscretization& disc = pb.disc;
  const double slack = c.verification.tolerances.operator_slack;
  std::mt19937_64 rng(c.bundle.seed);
  std::vector<std::pair<Vec, Vec>> pairs;
  std::vector<Vec> samples;
  for (std::size_t k = 0; k < c.verification.random_pairs; ++k) {
    const double su = 0.1 + 2.9 * uniform01(rng);
    const double sv = 0.1 + 2.9 * uniform01(rng);
    Vec u = random_vector(disc, rng, su / std::sqrt(static_cast<double>(disc.n)));
    Vec v = random_vector(disc, rng, sv / std::sqrt(static_cast<double>(disc.n)));
    samples.push_back(u);
    pairs.emplace_back(std::move(u), std::move(v));
  }
  const auto mono = check_monotonicity(pb.op, disc, pairs, slack);
  const auto coer = check_coercivity_boundedness(pb.op, disc, samples, slack);
  const MonotoneOperator zero = make_operator(OperatorKind::zero, 2.0, disc);
  const auto zero_coer = check_coercivity_boundedness(zero, disc, samples, slack);
  const auto nc = non_compactness_example(32, 8);

  run.check("operators.monotone", mono.passed);
  run.check("operators.coercive", coer.coercive);
  run.check("operators.bounded", coer.bounded);
  run.check("operators.zero_kind_not_coercive", !zero_coer.coercive);

  json report = {
      {"operator", to_string(pb.op.kind)},
      {"p", pb.op.p},
      {"declared", {{"c1", pb.op.c1}, {"c2", pb.op.c2}, {"a1", pb.op.a1}}},
      {"samples", mono.samples},
      {"monotonicity", {{"min_pairing", mono.min_pairing}, {"passed", mono.passed}}},
      {"coercivity",
       {{"min_slack", coer.min_coercivity_slack},
        {"measured_c2", coer.measured_c2},
        {"passed", coer.coercive}}},
      {"boundedness",
       {{"min_slack", coer.min_boundedness_slack},
        {"measured_c1", coer.measured_c1},
        {"passed", coer.bounded}}},
      {"zero_kind",
       {{"coercive", zero_coer.coercive},
        {"min_coercivity_slack", zero_coer.min_coercivity_slack},
        {"modes", nc.modes},
        {"terminal_norms", vec_json(nc.terminal_norms)},
        {"pairings_with_test", vec_json(nc.pairings_with_test)},
        {"l2v_norms", vec_json(nc.l2v_norms)},
        {"forcing_admissible", nc.forcing_admissible}}}};
  run.write_json("verify-operators.json", report);

  std::ostringstream csv;
  csv << "mode,terminal_norm,pairing_with_test,l2v_norm\n";
  for (std::size_t k = 0; k < nc.modes.size(); ++k) {
    csv << nc.modes[k] << ',' << num(nc.terminal_norms[k]) << ','
        << num(nc.pairings_with_test[k]) << ',' << num(nc.l2v_norms[k]) << '\n';
  }
  run.write_csv("verify-operators.csv", csv.str());
}

// ----------------------------------------------------------------- calculus

void suite_calculus(const ExperimentConfig& c, const ControlProblem& pb, Run& run) {
  const GelfandDiscretization& disc = pb.disc;
  const Tolerances& tol = c.verification.tolerances;
  const double T = pb.grid.T;
  const double L = bundle_L(c, pb);
  const int modes = std::max(2, clamp_modes(c, pb));
  // nu^eps with Lf = 1 / (2T) has eps0 = 1/e for every horizon.
  const double nu_Lf = 0.5 / T;
  const double nu_eps = 0.2;
  const auto quad = quadratic_plus_integral(disc, weighted_square(disc, 1.0));
  const auto comp = smooth_composite(disc, nu_eps, nu_Lf, 0.0);

  std::vector<double> dts;
  std::vector<double> parts, chain_q, chain_c, limit_q, limit_c;
  bool chain_ok = true;
  bool limit_ok = true;
  for (std::size_t steps : c.verification.dt_ladder) {
    const TimeGrid grid(T, steps);
    const Path prefix = Path::constant(grid, pb.x_star);
    const auto b = sample_bundle(disc, pb.op, 0.0, prefix, L, 1 + 2 * static_cast<std::size_t>(modes),
                                 c.bundle.seed, modes, pb.step_options);
    // Integration by parts on two independent extreme members; the chain rule
    // and the derivative limits on the unforced solution.
    const Path& x = b.members.at(1);
    const Path& y = b.members.at(4);
    const Path& free = b.members.at(0);
    dts.push_back(grid.dt());
    parts.push_back(check_parts(disc, pb.op, x, y, 0.0, T).residual);
    const auto cq = check_chain_rule(disc, pb.op, quad, free, 0.0, T, tol.kappa_c);
    const auto cc = check_chain_rule(disc, pb.op, comp, free, 0.0, T, tol.kappa_c);
    chain_q.push_back(cq.residual);
    chain_c.push_back(cc.residual);
    chain_ok = chain_ok && cq.passed && cc.passed;
    const double tmid = grid.time(steps / 2);
    const auto lq = check_derivative_limits(disc, quad, tmid, free, modes, tol.kappa_d);
    const auto lc = check_derivative_limits(disc, comp, tmid, free, modes, tol.kappa_d);
    limit_q.push_back(lq.max_error);
    limit_c.push_back(lc.max_error);
    limit_ok = limit_ok && lq.passed && lc.passed;
  }

  struct Row {
    const char* name;
    const std::vector<double>* residuals;
  };
  const Row rows[] = {{"parts", &parts},
                      {"chain_quadratic_plus_integral", &chain_q},
                      {"chain_smooth_composite", &chain_c},
                      {"limits_quadratic_plus_integral", &limit_q},
                      {"limits_smooth_composite", &limit_c}};
  json ladders = json::object();
  std::ostringstream csv;
  csv << "check,dt,residual\n";
  bool orders_ok = true;
  for (const Row& r : rows) {
    const auto order = observed_order(dts, *r.residuals, tol.order);
    orders_ok = orders_ok && order.passed;
    ladders[r.name] = {{"residuals", *r.residuals},
                       {"min_order", std::isinf(order.min_order) ? json("exact")
                                                                 : json(order.min_order)},
                       {"passed", order.passed}};
    for (std::size_t k = 0; k < dts.size(); ++k) {
      csv << r.name << ',' << num(dts[k]) << ',' << num((*r.residuals)[k]) << '\n';
    }
  }
  run.check("calculus.orders", orders_ok);
  run.check("calculus.chain_rule_bound", chain_ok);
  run.check("calculus.derivative_limits_bound", limit_ok);
  run.write_json("verify-calculus.json",
                 {{"dts", dts},
                  {"min_order", tol.order},
                  {"kappa_c", tol.kappa_c},
                  {"kappa_d", tol.kappa_d},
                  {"smooth_composite", {{"eps", nu_eps}, {"Lf", nu_Lf}}},
                  {"ladders", ladders}});
  run.write_csv("verify-calculus.csv", csv.str());
}

// ------------------------------------------------------------------ control

void suite_control(const ExperimentConfig& c, const ControlProblem& pb, Run& run) {
  const GelfandDiscretization& disc = pb.disc;
  const Path x0 = pb.initial_history();
  const double L = bundle_L(c, pb);
  const double tol = pb.tol_disc();

  // A-priori bound on the configured bundle.
  const TrajectoryBundle bundle = config_bundle(c, pb);
  const AprioriConstants ac = apriori_constants(disc, pb.op, 0.0, x0, L);
  std::size_t violations = 0;
  bool admissible = true;
  double max_sup = 0.0;
  for (const Path& m : bundle.members) {
    const double s = sup_norm(disc, m);
    max_sup = std::max(max_sup, s);
    if (s > ac.C2) ++violations;
    admissible = admissible && forcing_admissible(disc, m, L);
  }
  const auto pm = check_equiv_pseudometrics(disc, pb.op, bundle, pb.grid.T);
  run.check("control.apriori_bound", violations == 0);
  run.check("control.bundle_admissible", admissible);
  run.check("control.pseudometric", pm.passed);

  // Continuous dependence on randomized pairs of initial histories.
  std::mt19937_64 rng(c.bundle.seed ^ 0x9e3779b97f4a7c15ULL);
  const std::size_t pairs = std::min<std::size_t>(c.verification.random_pairs, 50);
  double cd_excess = -std::numeric_limits<double>::infinity();
  double cd_ratio = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const Path a = Path::constant(pb.grid, pb.x_star + random_vector(disc, rng, 0.3 / std::sqrt(disc.n)));
    const Path b = Path::constant(pb.grid, pb.x_star + random_vector(disc, rng, 0.3 / std::sqrt(disc.n)));
    const double p = pb.P[k % pb.P.size()];
    const double q = pb.Q[k % pb.Q.size()];
    const RhsFunction fa = [&pb, p, q](const PathView& v) { return pb.f(v, p, q); };
    const auto r = verify_continuous_dependence(disc, pb.op, fa, pb.Lf, 0.0, a, b, tol,
                                                pb.step_options);
    cd_excess = std::max(cd_excess, r.max_excess);
    cd_ratio = std::max(cd_ratio, r.max_ratio);
  }
  run.check("control.continuous_dependence", cd_excess <= tol);

  // Saturating instance: A = 0, f = Lf x(t); the bound is attained up to the scheme.
  const MonotoneOperator zero = make_operator(OperatorKind::zero, 2.0, disc);
  const RhsFunction sat = [Lf = pb.Lf](const PathView& v) { return Vec(Lf * v.now()); };
  const Path sa = Path::constant(pb.grid, pb.x_star);
  const Path sb = Path::constant(pb.grid, pb.x_star + 0.1 * disc.sine_mode(1));
  const auto sr = verify_continuous_dependence(disc, zero, sat, pb.Lf, 0.0, sa, sb, tol);
  const double tightness = sr.bounds.back() - sr.gaps.back();
  run.check("control.saturating_tight", sr.passed && std::abs(tightness) <= 3.0 * tol);

  // DPP at every interior node of the control partition.
  json dpp = json::array();
  std::ostringstream csv;
  csv << "t,lhs,rhs,gap\n";
  bool dpp_ok = true;
  for (std::size_t k = 1; k < pb.control_intervals; ++k) {
    const auto d = check_dpp(pb, 0.0, x0, pb.control_time(k), c.verification.tolerances.dpp);
    dpp_ok = dpp_ok && d.passed;
    dpp.push_back({{"t", d.t}, {"lhs", d.lhs}, {"rhs", d.rhs}, {"gap", d.gap}});
    csv << num(d.t) << ',' << num(d.lhs) << ',' << num(d.rhs) << ',' << num(d.gap) << '\n';
  }
  run.check("control.dpp", dpp_ok);

  // Value regularity on bundle-member pairs.
  json regularity = nullptr;
  if (pb.control_intervals >= 2) {
    const auto small = sample_bundle(disc, pb.op, 0.0, x0, L, 8, c.bundle.seed,
                                     clamp_modes(c, pb), pb.step_options);
    std::vector<RegularitySample> samples;
    for (std::size_t i = 1; i < small.size(); ++i) {
      samples.push_back({pb.control_time(1), small.members[i],
                         small.members[(i + 1) % small.size()], pb.control_time(2)});
    }
    const auto rr = check_value_regularity(pb, L, samples, tol);
    run.check("control.value_regularity", rr.passed);
    regularity = {{"samples", rr.samples},
                  {"space_constant", rr.space_constant},
                  {"time_constant", rr.time_constant},
                  {"max_space_ratio", rr.max_space_ratio},
                  {"max_time_ratio", rr.max_time_ratio},
                  {"passed", rr.passed}};
  }

  run.write_json("verify-control.json",
                 {{"tol_disc", tol},
                  {"apriori",
                   {{"C2", ac.C2}, {"C", ac.C}, {"max_sup", max_sup},
                    {"violations", violations}, {"members", bundle.size()}}},
                  {"pseudometric",
                   {{"constant_C", pm.constant_C}, {"max_ratio", pm.max_ratio},
                    {"min_slack", pm.min_slack}}},
                  {"equicontinuity_constant", equicontinuity_constant(disc, bundle)},
                  {"continuous_dependence",
                   {{"pairs", pairs}, {"max_excess", cd_excess}, {"max_ratio", cd_ratio}}},
                  {"saturating", {{"gap", sr.gaps.back()}, {"bound", sr.bounds.back()},
                                  {"tightness", tightness}}},
                  {"dpp", dpp},
                  {"regularity", regularity}});
  run.write_csv("verify-control.csv", csv.str());
}

// ------------------------------------------------------------------ minimax

void suite_minimax(const ExperimentConfig& c, const ControlProblem& pb, Run& run) {
  const Path x0 = pb.initial_history();
  const TrajectoryBundle bundle =
      control_bundle(pb, 0.0, x0, c.bundle.size, c.bundle.seed, clamp_modes(c, pb));
  std::vector<double> times;
  for (std::size_t k = 0; k <= pb.control_intervals; ++k) times.push_back(pb.control_time(k));
  const auto zs = sample_directions(pb.disc, std::min(3, pb.disc.n), c.verification.z_random,
                                    c.bundle.seed);
  const MinimaxInputs in = minimax_inputs(pb, bundle, zs, times);
  const double delta = 10.0 * in.tol_disc;
  const std::size_t st = pb.steps_per_interval(pb.control_intervals);

  json cases = json::array();
  std::ostringstream csv;
  csv << "candidate,side,t,z_index,best_slack,witness,passed\n";
  bool v_ok = false, minus_ok = false, plus_ok = false;
  for (double shift : {0.0, -delta, delta}) {
    const auto u = bellman_value_candidate(pb, shift);
    const auto sup = check_supersolution(u, in);
    const auto sub = check_subsolution(u, in);
    const auto inf = check_infinitesimal(u, in, {st, 2 * st, 4 * st});
    const std::string name = shift == 0.0 ? "v" : (shift < 0.0 ? "v-delta" : "v+delta");
    if (shift == 0.0) {
      v_ok = sup.passed && sub.passed && inf.super_passed && inf.sub_passed;
    } else if (shift < 0.0) {
      minus_ok = sup.inequalities_passed && !sup.terminal_passed && sub.passed;
    } else {
      plus_ok = sub.inequalities_passed && !sub.terminal_passed && sup.passed;
    }
    cases.push_back({{"candidate", name},
                     {"shift", shift},
                     {"super", {{"inequalities", sup.inequalities_passed},
                                {"terminal", sup.terminal_passed},
                                {"worst_slack", sup.worst_slack},
                                {"terminal_min_slack", sup.terminal_min_slack}}},
                     {"sub", {{"inequalities", sub.inequalities_passed},
                              {"terminal", sub.terminal_passed},
                              {"worst_slack", sub.worst_slack},
                              {"terminal_min_slack", sub.terminal_min_slack}}},
                     {"infinitesimal", {{"super", inf.super_passed}, {"sub", inf.sub_passed}}}});
    for (const auto* rep : {&sup, &sub}) {
      for (const MinimaxEntry& e : rep->entries) {
        csv << name << ',' << rep->side << ',' << num(e.t) << ',' << e.z_index << ','
            << num(e.best_slack) << ',' << e.witness << ',' << (e.passed ? 1 : 0) << '\n';
      }
    }
  }
  run.check("minimax.value_is_solution", v_ok);
  run.check("minimax.v_minus_delta_fails_super_terminal_only", minus_ok);
  run.check("minimax.v_plus_delta_fails_sub_terminal_only", plus_ok);

  const auto v = bellman_value_candidate(pb, 0.0);
  const auto vd = bellman_value_candidate(pb, delta);
  const auto cmp = empirical_comparison(v, vd, bundle, times, 1e-12);
  run.check("minimax.comparison", cmp.passed);

  const std::vector<double> stab_times{0.0, pb.control_time(pb.control_intervals / 2)};
  const auto s1 = stability_sweep(pb, StabilityFamily::terminal_shift, bundle, stab_times, 1e-12);
  const auto s2 = stability_sweep(pb, StabilityFamily::running_scale, bundle, stab_times, 1e-12);
  run.check("minimax.stability_terminal_shift", s1.passed);
  run.check("minimax.stability_running_scale", s2.passed);

  run.write_json("verify-minimax.json",
                 {{"members", bundle.size()},
                  {"directions", zs.size()},
                  {"tol_disc", in.tol_disc},
                  {"delta", delta},
                  {"cases", cases},
                  {"comparison", {{"max_excess", cmp.max_excess}, {"min_gap", cmp.min_gap}}},
                  {"stability",
                   {{"ns", s1.ns},
                    {"terminal_shift", {{"gaps", s1.gaps}, {"bounds", s1.bounds}}},
                    {"running_scale", {{"gaps", s2.gaps}, {"bounds", s2.bounds}}}}}});
  run.write_csv("verify-minimax.csv", csv.str());
}

// --------------------------------------------------------------------- game

struct LadderRow {
  double eps = 0.0;
  std::size_t intervals = 0;
  GuaranteeEntry entry;
};

std::size_t finest(const std::vector<std::size_t>& partitions) {
  return *std::max_element(partitions.begin(), partitions.end());
}

void suite_game(const ExperimentConfig& c, const ControlProblem& pb, Run& run) {
  const GelfandDiscretization& disc = pb.disc;
  const Path x0 = pb.initial_history();
  const auto& parts = c.verification.partitions;
  const auto& eps = c.verification.eps;
  const std::size_t fine = finest(parts);

  // Isaacs condition on bundle states and sampled directions.
  const TrajectoryBundle bundle = config_bundle(c, pb);
  const auto zs = sample_directions(disc, std::min(3, disc.n), c.verification.z_random,
                                    c.bundle.seed);
  std::vector<std::pair<PathView, Vec>> states;
  for (const Path& m : bundle.members) {
    for (std::size_t k = 0; k <= pb.control_intervals; ++k) {
      const std::size_t i = pb.grid.index_of(pb.control_time(k));
      for (const Vec& z : zs) states.emplace_back(PathView(m, i), z);
    }
  }
  const auto isaacs = check_isaacs(disc, pb.hamiltonian(HamiltonianMode::isaacs_minmax), states,
                                   c.verification.tolerances.isaacs);
  run.check("game.isaacs", isaacs.passed);
  const auto coupled = coupled_bilinear_example();
  const Path dummy = Path::constant(TimeGrid(1.0, 1), Vec::Zero(1));
  const auto coupled_r = check_isaacs(assemble_discretization(1.0, 1), coupled,
                                      {{PathView(dummy, 0), Vec::Zero(1)}}, 1e-12);
  run.check("game.coupled_counterexample_gap_2", std::abs(coupled_r.max_gap - 2.0) <= 1e-12);

  // Tree values and tree strategies per partition.
  const auto u_tree = tree_value(pb, 0.0, x0, fine, TreeOrder::controller_first, 1u << 22);
  const double u = u_tree.value;
  json trees = json::array();
  std::ostringstream tcsv;
  tcsv << "intervals,upper,lower,J_a_tree,J_b_tree\n";
  bool bracket_ok = true;
  for (std::size_t K : parts) {
    const auto up = tree_value(pb, 0.0, x0, K, TreeOrder::controller_first, 1u << 22);
    const auto lo = tree_value(pb, 0.0, x0, K, TreeOrder::disturbance_first, 1u << 22);
    const auto a = tree_strategy(pb, Side::controller, K, 1u << 22);
    const auto b = tree_strategy(pb, Side::disturbance, K, 1u << 22);
    const double Ja = guaranteed_result_a(pb, 0.0, x0, a, K, 1u << 16).value;
    const double Jb = guaranteed_result_b(pb, 0.0, x0, b, K, 1u << 16).value;
    const double slack = 1e-12 * (1.0 + std::abs(up.value));
    const bool ok = Jb <= up.value + slack && up.value <= Ja + slack && lo.value <= up.value + slack;
    bracket_ok = bracket_ok && ok;
    trees.push_back({{"intervals", K}, {"upper", up.value}, {"lower", lo.value},
                     {"J_a", Ja}, {"J_b", Jb}, {"bracket", ok}});
    tcsv << K << ',' << num(up.value) << ',' << num(lo.value) << ',' << num(Ja) << ','
         << num(Jb) << '\n';
  }
  run.check("game.tree_bracketing", bracket_ok);

  // Extremal shift on the paired ladder (eps_k, partitions_k).
  json ladder = nullptr;
  const double eps0 = epsilon_zero(pb.Lf, pb.grid.T, 0.0);
  if (eps.size() == parts.size()) {
    bool in_range = std::all_of(eps.begin(), eps.end(), [&](double e) { return e < eps0; });
    if (!in_range) {
      throw SchemaError("verification.eps: entries must lie below eps0 = " + num(eps0));
    }
    ExtremalShiftOptions opts;
    opts.value_intervals = fine;
    opts.budget = 1u << 22;
    const std::size_t coarse = *std::min_element(parts.begin(), parts.end());
    const auto gb = game_bundle(pb, 0.0, x0, coarse, fine, std::max<std::size_t>(c.bundle.size, 1),
                                c.bundle.seed);
    const ExtremalShiftState state(pb, gb, opts);
    const auto rep = check_guarantee(state, eps, parts);
    json rows = json::array();
    for (const auto& e : rep.entries) {
      rows.push_back({{"eps", e.eps}, {"intervals", e.intervals}, {"J_a", e.J_a}, {"J_b", e.J_b},
                      {"u", e.u}, {"bound_term", e.bound_term}, {"residual", e.residual},
                      {"bracket", e.bracket}});
    }
    const auto fine_entry = std::find_if(rep.entries.begin(), rep.entries.end(),
                                         [&](const GuaranteeEntry& e) { return e.intervals == fine; });
    if (fine_entry != rep.entries.end()) {
      run.check("game.extremal_shift_bracket_finest", fine_entry->bracket);
    }
    run.check("game.extremal_shift_residual_decreasing", rep.residual_decreasing);
    ladder = {{"eps0", eps0}, {"u", u}, {"rows", rows}};
  } else {
    throw SchemaError("verification: 'eps' and 'partitions' must have equal length for the "
                      "extremal-shift ladder");
  }

  // Finite-difference check of the nu^eps derivatives on bundle states.
  std::vector<NuSample> nus;
  for (const Path& m : bundle.members) {
    for (std::size_t i = 0; i < m.nodes(); i += std::max<std::size_t>(1, m.nodes() / 8)) {
      const PathView v(m, i);
      nus.push_back({v.time(), v.now(), v.integral_sq(disc)});
    }
  }
  const auto nd = check_nu_derivatives(disc, eps.back(), pb.Lf, 0.0, nus, std::min(3, disc.n),
                                       c.verification.tolerances.nu_fd);
  run.check("game.nu_derivatives", nd.passed);

  run.write_json("verify-game.json",
                 {{"u", u},
                  {"isaacs", {{"samples", isaacs.samples}, {"max_gap", isaacs.max_gap}}},
                  {"coupled_gap", coupled_r.max_gap},
                  {"trees", trees},
                  {"extremal_shift", ladder},
                  {"nu_derivatives",
                   {{"samples", nd.samples}, {"max_error_t", nd.max_error_t},
                    {"max_error_x", nd.max_error_x}}}});
  run.write_csv("verify-game.csv", tcsv.str());
}

using SuiteFn = void (*)(const ExperimentConfig&, const ControlProblem&, Run&);

SuiteFn suite_by_name(const std::string& suite) {
  if (suite == "operators") return suite_operators;
  if (suite == "calculus") return suite_calculus;
  if (suite == "control") return suite_control;
  if (suite == "minimax") return suite_minimax;
  if (suite == "game") return suite_game;
  throw SchemaError("unknown suite '" + suite + "'");
}

}  // namespace

int run_verify(const ExperimentConfig& config, const RunContext& ctx, const std::string& suite) {
  const SuiteFn fn = suite_by_name(suite);
  const ControlProblem pb = build_problem(config);
  Run run(config, ctx);
  fn(config, pb, run);
  return run.finish();
}

int run_configured_suites(const ExperimentConfig& config, const RunContext& ctx) {
  if (config.verification.suites.empty()) {
    throw SchemaError("verification.suites is empty; name a suite on the command line");
  }
  std::vector<SuiteFn> fns;
  for (const auto& s : config.verification.suites) fns.push_back(suite_by_name(s));
  const ControlProblem pb = build_problem(config);
  Run run(config, ctx);
  for (SuiteFn fn : fns) fn(config, pb, run);
  return run.finish();
}

int run_solve_evolution(const ExperimentConfig& config, const RunContext& ctx,
                        std::size_t p_index, std::size_t q_index) {
  const ControlProblem pb = build_problem(config);
  if (p_index >= pb.P.size() || q_index >= pb.Q.size()) {
    throw SchemaError("solve-evolution: control index out of range");
  }
  Run run(config, ctx);
  const double p = pb.P[p_index];
  const double q = pb.Q[q_index];
  const Path x0 = pb.initial_history();
  const RhsSpec rhs = feedback_rhs([&pb, p, q](const PathView& v) { return pb.f(v, p, q); }, pb.Lf);
  const Path x = solve_ivp(pb.disc, pb.op, 0.0, x0, rhs, pb.step_options);
  const AprioriConstants ac = apriori_constants(pb.disc, pb.op, 0.0, x0, pb.Lf);
  double max_residual = 0.0;
  for (std::size_t i = 0; i + 1 < x.nodes(); ++i) {
    max_residual = std::max(
        max_residual, step_residual(pb.disc, pb.op, x.grid.time(i + 1), x.at(i), x.at(i + 1),
                                    Vec(x.forcing->col(static_cast<Eigen::Index>(i))),
                                    x.grid.dt()));
  }
  const double sup = sup_norm(pb.disc, x);
  const bool admissible = forcing_admissible(pb.disc, x, pb.Lf);
  run.check("solve.apriori_bound", sup <= ac.C2);
  run.check("solve.forcing_admissible", admissible);
  std::ostringstream csv;
  write_path_csv(csv, x);
  run.write_csv("path.csv", csv.str());
  run.write_json("solve-evolution.json",
                 {{"problem", pb.name},
                  {"operator", to_string(pb.op.kind)},
                  {"n", pb.disc.n},
                  {"steps", pb.grid.steps},
                  {"dt", pb.grid.dt()},
                  {"control", {{"p", p}, {"q", q}}},
                  {"sup_norm", sup},
                  {"terminal_norm", pb.disc.norm_h(x.at(x.nodes() - 1))},
                  {"max_step_residual", max_residual},
                  {"apriori", {{"C2", ac.C2}, {"C3", ac.C3}, {"C4", ac.C4}, {"C6", ac.C6},
                               {"C7", ac.C7}, {"C", ac.C}, {"epsilon", ac.epsilon}}}});
  return run.finish();
}

int run_value(const ExperimentConfig& config, const RunContext& ctx, double t0,
              std::size_t state_id) {
  const ControlProblem pb = build_problem(config);
  const TrajectoryBundle bundle = config_bundle(config, pb);
  if (state_id >= bundle.size()) {
    throw SchemaError("value: state id " + std::to_string(state_id) + " exceeds bundle size " +
                      std::to_string(bundle.size()));
  }
  const double k = t0 / pb.grid.T * static_cast<double>(pb.control_intervals);
  if (std::abs(k - std::round(k)) > 1e-9 || k < 0.0 ||
      k > static_cast<double>(pb.control_intervals)) {
    throw SchemaError("value: t0 must be a node of the control partition");
  }
  const double tnode = pb.control_time(static_cast<std::size_t>(std::round(k)));
  Run run(config, ctx);
  const Path& x = bundle.members[state_id];
  json body = {{"problem", pb.name}, {"t0", tnode}, {"state_id", state_id}};
  if (pb.Q.size() == 1) {
    const auto r = brute_force_value(pb, tnode, x, 1u << 22);
    std::vector<double> controls;
    for (std::size_t i : r.controls) controls.push_back(pb.P[i]);
    body["value"] = r.value;
    body["argmin"] = {{"indices", r.controls}, {"controls", controls}};
    body["leaves"] = r.leaves;
  } else {
    const auto up = tree_value(pb, tnode, x, pb.control_intervals, TreeOrder::controller_first,
                               1u << 22);
    const auto lo = tree_value(pb, tnode, x, pb.control_intervals, TreeOrder::disturbance_first,
                               1u << 22);
    body["value"] = up.value;
    body["lower_value"] = lo.value;
    body["argmin"] = {{"p_index", up.p_index}, {"p", pb.P[up.p_index]}};
    body["argmax"] = {{"q_index", lo.q_index}, {"q", pb.Q[lo.q_index]}};
    body["leaves"] = up.leaves;
  }
  run.write_json("value.json", body);
  run.check("value.computed", std::isfinite(body["value"].get<double>()));
  return run.finish();
}

int run_game(const ExperimentConfig& config, const RunContext& ctx,
             const std::vector<double>& eps, const std::vector<std::size_t>& partitions) {
  const ControlProblem pb = build_problem(config);
  const double eps0 = epsilon_zero(pb.Lf, pb.grid.T, 0.0);
  for (double e : eps) {
    if (!(e > 0.0 && e < eps0)) {
      throw SchemaError("game: eps " + num(e) + " outside (0, eps0 = " + num(eps0) + ")");
    }
  }
  for (std::size_t K : partitions) {
    try {
      pb.steps_per_interval(K);
    } catch (const InvalidArgument& err) {
      throw SchemaError(std::string("game: ") + err.what());
    }
  }
  const std::size_t fine = finest(partitions);
  const std::size_t coarse = *std::min_element(partitions.begin(), partitions.end());
  const Path x0 = pb.initial_history();
  Run run(config, ctx);
  ExtremalShiftOptions opts;
  opts.value_intervals = fine;
  opts.budget = 1u << 22;
  const auto gb = game_bundle(pb, 0.0, x0, coarse, fine, std::max<std::size_t>(config.bundle.size, 1),
                              config.bundle.seed);
  const ExtremalShiftState state(pb, gb, opts);
  state.precompute();
  const double u = state.root_value();

  std::ostringstream csv;
  csv << "eps,intervals,J_a,J_b,value,upper_gap,lower_gap,bound_term,residual\n";
  json rows = json::array();
  bool bracket_fine = true;
  for (double e : eps) {
    std::vector<double> es(partitions.size(), e);
    const auto rep = check_guarantee(state, es, partitions);
    for (const auto& r : rep.entries) {
      csv << num(r.eps) << ',' << r.intervals << ',' << num(r.J_a) << ',' << num(r.J_b) << ','
          << num(u) << ',' << num(r.upper_excess) << ',' << num(r.lower_excess) << ','
          << num(r.bound_term) << ',' << num(r.residual) << '\n';
      rows.push_back({{"eps", r.eps}, {"intervals", r.intervals}, {"J_a", r.J_a},
                      {"J_b", r.J_b}, {"value", u}, {"upper_gap", r.upper_excess},
                      {"lower_gap", r.lower_excess}, {"residual", r.residual}});
      if (r.intervals == fine) bracket_fine = bracket_fine && r.bracket;
    }
  }
  run.check("game.bracket_finest_partition", bracket_fine);
  run.write_csv("game.csv", csv.str());
  run.write_json("game.json", {{"eps0", eps0}, {"value", u}, {"value_intervals", fine},
                               {"bundle_members", gb.size()}, {"rows", rows}});
  return run.finish();
}

}  // namespace pathhj::cli
