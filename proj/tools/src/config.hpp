#pragma once

// Experiment configuration: a JSON document with the blocks discretization,
// operator, problem, bundle, verification and output. Validation is strict:
// unknown keys, wrong types and unresolvable references are schema errors.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "pathhj/presets.hpp"

namespace pathhj::cli {

/// Any violation of the configuration schema; maps to exit status 2.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DiscretizationBlock {
  std::optional<int> n;
  std::optional<double> dt;
  std::optional<double> domain_length;
  std::optional<double> T;
};

struct OperatorBlock {
  std::optional<OperatorKind> kind;
  std::optional<double> p;
};

struct BundleBlock {
  double L = 0.0;  ///< 0: the problem's Lf
  std::size_t size = 16;
  int modes = 3;
  std::uint64_t seed = 0;
};

struct Tolerances {
  double dpp = 1e-10;
  double isaacs = 1e-12;
  double order = 0.9;
  double kappa_c = 10.0;
  double kappa_d = 10.0;
  double nu_fd = 1e-5;
  double operator_slack = 1e-10;
};

struct VerificationBlock {
  std::vector<std::string> suites;
  Tolerances tolerances;
  std::vector<double> eps{0.2, 0.1, 0.05};
  std::vector<std::size_t> partitions{2, 4, 8};
  std::size_t random_pairs = 100;
  std::size_t z_random = 8;
  std::vector<std::size_t> dt_ladder{16, 32, 64};
};

struct OutputBlock {
  std::string directory = "pathhj-out";
  bool csv = true;
  bool json = true;
};

struct ExperimentConfig {
  DiscretizationBlock discretization;
  OperatorBlock op;
  std::optional<std::string> preset;
  std::optional<InlineProblemSpec> inline_problem;
  std::optional<std::size_t> control_intervals;
  std::optional<double> Lf;
  std::optional<double> tau;
  double kappa = 0.25;
  BundleBlock bundle;
  VerificationBlock verification;
  OutputBlock output;
  nlohmann::json source;  ///< the validated document, for hashing
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// Builds the problem the config describes. Cross-block inconsistencies
/// (operator kind vs preset, non-integral T/dt, ...) raise SchemaError.
ControlProblem build_problem(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical (sorted-key, compact) dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& doc);

/// The published schema (JSON Schema draft 2020-12) describing the format
/// accepted by parse_config.
const nlohmann::json& config_schema();

}  // namespace pathhj::cli
