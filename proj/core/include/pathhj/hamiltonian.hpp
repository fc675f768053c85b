#pragma once

// Bellman and Isaacs Hamiltonians over finite control sets. Controls are
// scalars; a one-player problem uses Q = {0}.

#include <cstddef>
#include <functional>
#include <vector>

#include "pathhj/pathspace.hpp"

namespace pathhj {

using DynamicsFn = std::function<Vec(const PathView&, double p, double q)>;
using RunningCostFn = std::function<double(const PathView&, double p, double q)>;

enum class HamiltonianMode { bellman, isaacs_minmax, isaacs_maxmin };

struct HamiltonianSpec {
  HamiltonianMode mode = HamiltonianMode::bellman;
  std::vector<double> P;
  std::vector<double> Q{0.0};
  DynamicsFn f;
  RunningCostFn ell;
  /// Growth scale in |F(z) - F(z~)| <= L0 (1 + sup|x|) |z - z~|.
  double L0 = 0.0;
};

struct FValue {
  double value = 0.0;
  std::size_t p_index = 0;
  std::size_t q_index = 0;
};

/// Exact enumeration; ties go to the lowest index. Bellman mode uses Q[0].
FValue eval_F(const GelfandDiscretization& disc, const HamiltonianSpec& spec,
              const PathView& x, const Vec& z);

/// ell + (f, z) for one control pair.
double hamiltonian_term(const GelfandDiscretization& disc, const HamiltonianSpec& spec,
                        const PathView& x, double p, double q, const Vec& z);

struct HFSample {
  const Path* x = nullptr;
  const Path* y = nullptr;
  std::size_t index = 0;
  Vec z;
  Vec z_tilde;
};

struct HFReport {
  std::size_t samples = 0;
  double min_slack_z = 0.0;   ///< growth in z
  double min_slack_x = 0.0;   ///< Lipschitz in the path
  double max_ratio_z = 0.0;
  double max_ratio_x = 0.0;
  bool passed = false;
};

/// Checks |F(x,z) - F(x,z~)| <= L0 (1 + sup_{s<=t}|x|) |z - z~| and
/// |F(x,z) - F(y,z)| <= Lf (1 + |z|) sqrt(|x(t) - y(t)|^2 + int_0^t |x - y|^2).
HFReport check_HF(const GelfandDiscretization& disc, const HamiltonianSpec& spec,
                  double Lf, const std::vector<HFSample>& samples, double tol = 1e-10);

struct IsaacsReport {
  std::size_t samples = 0;
  double max_gap = 0.0;
  bool passed = false;
};

IsaacsReport check_isaacs(const GelfandDiscretization& disc, const HamiltonianSpec& spec,
                          const std::vector<std::pair<PathView, Vec>>& samples,
                          double tol = 1e-12);

/// f = 0, ell = p q on P = Q = {-1, 1}: min-max 1, max-min -1.
HamiltonianSpec coupled_bilinear_example();

}  // namespace pathhj
