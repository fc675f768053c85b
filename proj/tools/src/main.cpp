// pathhj: experiment runner over the path-dependent HJ laboratory.
//
//   pathhj solve-evolution --config c.json
//   pathhj value --config c.json --t0 0.5 --state-id 3
//   pathhj game --config c.json --eps 0.2,0.1 --partitions 2,4,8
//   pathhj verify operators --config c.json
//   pathhj schema
//
// Exit status: 0 all assertions pass, 1 some assertion fails, 2 schema or
// usage error, 3 numerical failure.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "config.hpp"
#include "pathhj/errors.hpp"
#include "runner.hpp"

namespace {

constexpr int kSchemaExit = 2;
constexpr int kNumericalExit = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace pathhj::cli;

  CLI::App app{"pathhj: path-dependent Hamilton-Jacobi laboratory"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool no_timestamp = false;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("-o,--out", out_dir, "artifact directory (default: output.directory)");
    sub->add_flag("--no-timestamp", no_timestamp, "omit the creation time from the manifest");
  };

  std::size_t p_index = 0;
  std::size_t q_index = 0;
  CLI::App* solve = app.add_subcommand("solve-evolution", "integrate the state equation");
  common(solve);
  solve->add_option("--p-index", p_index, "index into P held on [0, T]");
  solve->add_option("--q-index", q_index, "index into Q held on [0, T]");

  double t0 = 0.0;
  std::size_t state_id = 0;
  CLI::App* value = app.add_subcommand("value", "brute-force value at a bundle state");
  common(value);
  value->add_option("--t0", t0, "node of the control partition")->required();
  value->add_option("--state-id", state_id, "bundle member index")->required();

  std::vector<double> eps;
  std::vector<std::size_t> partitions;
  CLI::App* game = app.add_subcommand("game", "extremal-shift ladder (CSV)");
  common(game);
  game->add_option("--eps", eps, "comma-separated eps values")->delimiter(',')->required();
  game->add_option("--partitions", partitions, "comma-separated interval counts")
      ->delimiter(',')
      ->required();

  std::string suite;
  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  common(verify);
  verify->add_option("suite", suite, "operators|calculus|minimax|control|game|all")
      ->check(CLI::IsMember({"operators", "calculus", "minimax", "control", "game", "all"}))
      ->required();

  CLI::App* schema = app.add_subcommand("schema", "print the config JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kSchemaExit;
  }

  if (schema->parsed()) {
    std::cout << config_schema().dump(2) << '\n';
    return 0;
  }

  try {
    const ExperimentConfig config = load_config(config_path);
    RunContext ctx;
    ctx.out_dir = out_dir.empty() ? config.output.directory : out_dir;
    ctx.timestamp = !no_timestamp;
    if (solve->parsed()) {
      ctx.command = "solve-evolution";
      return run_solve_evolution(config, ctx, p_index, q_index);
    }
    if (value->parsed()) {
      ctx.command = "value";
      return run_value(config, ctx, t0, state_id);
    }
    if (game->parsed()) {
      ctx.command = "game";
      return run_game(config, ctx, eps, partitions);
    }
    ctx.command = "verify " + suite;
    return suite == "all" ? run_configured_suites(config, ctx) : run_verify(config, ctx, suite);
  } catch (const SchemaError& e) {
    std::cerr << "pathhj: schema error: " << e.what() << '\n';
    return kSchemaExit;
  } catch (const pathhj::InvalidArgument& e) {
    std::cerr << "pathhj: invalid input: " << e.what() << '\n';
    return kSchemaExit;
  } catch (const pathhj::NumericalFailure& e) {
    std::cerr << "pathhj: numerical failure at t = " << e.time() << " (residual "
              << e.residual() << "): " << e.what() << '\n';
    return kNumericalExit;
  } catch (const pathhj::BudgetExceeded& e) {
    std::cerr << "pathhj: numerical failure: " << e.what() << '\n';
    return kNumericalExit;
  } catch (const std::exception& e) {
    std::cerr << "pathhj: error: " << e.what() << '\n';
    return kNumericalExit;
  }
}
