#pragma once

// Finite sampled stand-in for the trajectory set X^L(t0, x0).

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "pathhj/evolution.hpp"

namespace pathhj {

struct TrajectoryBundle {
  double t0 = 0.0;
  Path prefix;
  double L = 0.0;
  std::uint64_t seed = 0;
  int modes = 3;
  std::vector<Path> members;

  std::size_t size() const { return members.size(); }
};

/// Deterministic member generator: the zero-forcing member, then the extremes
/// +/- L (1 + m(t)) e_j for j = 1..k, then random members whose forcing on each
/// step has a uniformly random direction in span{e_1..e_k} and magnitude
/// theta L (1 + m(t)), theta ~ U[0,1]. Member j uses the stream seed + j.
TrajectoryBundle sample_bundle(const GelfandDiscretization& disc,
                               const MonotoneOperator& op, double t0,
                               const Path& prefix, double L, std::size_t size,
                               std::uint64_t seed, int modes = 3,
                               const StepOptions& options = {});

/// |f^x(t_i)| <= L (1 + sup_{s <= t_i} |x(s)|) + tol on every stored step
/// after the birth index.
bool forcing_admissible(const GelfandDiscretization& disc, const Path& x, double L,
                        double tol = 1e-12);

struct PseudometricReport {
  std::size_t pairs = 0;
  double constant_C = 0.0;
  double max_ratio = 0.0;  ///< max lhs / rhs over pairs with rhs > 0
  double min_slack = 0.0;  ///< min rhs - lhs
  bool passed = false;
};

/// sup_{s <= t} |x(s) - y(s)|^2 <= 4 C ||x - y||_{L2(t0,t;H)} for all member
/// pairs, with the L2 norm taken by the right-endpoint rule of the scheme.
PseudometricReport check_equiv_pseudometrics(const GelfandDiscretization& disc,
                                             const MonotoneOperator& op,
                                             const TrajectoryBundle& bundle, double t);

/// max over members and steps of |x(t_{i+1}) - x(t_i)| / sqrt(dt).
double equicontinuity_constant(const GelfandDiscretization& disc,
                               const TrajectoryBundle& bundle);

/// Long-format CSV: t, x_1..x_n, f_1..f_n (forcing blank on the last node).
void write_path_csv(std::ostream& out, const Path& path);
std::string bundle_manifest_json(const TrajectoryBundle& bundle);

}  // namespace pathhj
