#include "pathhj/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pathhj/errors.hpp"

namespace pathhj {

double hamiltonian_term(const GelfandDiscretization& disc, const HamiltonianSpec& spec,
                        const PathView& x, double p, double q, const Vec& z) {
  double value = spec.ell(x, p, q);
  if (z.size() > 0) value += disc.inner(spec.f(x, p, q), z);
  return value;
}

FValue eval_F(const GelfandDiscretization& disc, const HamiltonianSpec& spec,
              const PathView& x, const Vec& z) {
  if (spec.P.empty() || spec.Q.empty()) throw InvalidArgument("eval_F: empty control set");
  const std::size_t np = spec.P.size();
  const std::size_t nq = spec.Q.size();
  FValue out;
  if (spec.mode == HamiltonianMode::bellman) {
    out.value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < np; ++i) {
      const double v = hamiltonian_term(disc, spec, x, spec.P[i], spec.Q[0], z);
      if (v < out.value) out = {v, i, 0};
    }
    return out;
  }
  std::vector<double> table(np * nq);
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < nq; ++j) {
      table[i * nq + j] = hamiltonian_term(disc, spec, x, spec.P[i], spec.Q[j], z);
    }
  }
  if (spec.mode == HamiltonianMode::isaacs_minmax) {
    out.value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < np; ++i) {
      std::size_t jbest = 0;
      for (std::size_t j = 1; j < nq; ++j) {
        if (table[i * nq + j] > table[i * nq + jbest]) jbest = j;
      }
      if (table[i * nq + jbest] < out.value) out = {table[i * nq + jbest], i, jbest};
    }
  } else {
    out.value = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nq; ++j) {
      std::size_t ibest = 0;
      for (std::size_t i = 1; i < np; ++i) {
        if (table[i * nq + j] < table[ibest * nq + j]) ibest = i;
      }
      if (table[ibest * nq + j] > out.value) out = {table[ibest * nq + j], ibest, j};
    }
  }
  return out;
}

HFReport check_HF(const GelfandDiscretization& disc, const HamiltonianSpec& spec,
                  double Lf, const std::vector<HFSample>& samples, double tol) {
  HFReport report;
  report.min_slack_z = std::numeric_limits<double>::infinity();
  report.min_slack_x = std::numeric_limits<double>::infinity();
  for (const HFSample& s : samples) {
    const PathView vx(*s.x, s.index);
    const double fz = eval_F(disc, spec, vx, s.z).value;

    const double lhs_z = std::abs(fz - eval_F(disc, spec, vx, s.z_tilde).value);
    const double rhs_z =
        spec.L0 * (1.0 + vx.running_sup(disc)) * disc.norm_h(s.z - s.z_tilde);
    report.min_slack_z = std::min(report.min_slack_z, rhs_z - lhs_z);
    if (rhs_z > 0.0) report.max_ratio_z = std::max(report.max_ratio_z, lhs_z / rhs_z);

    const PathView vy(*s.y, s.index);
    const double lhs_x = std::abs(fz - eval_F(disc, spec, vy, s.z).value);
    double integral = 0.0;
    const double dt = vx.grid().dt();
    for (std::size_t j = 0; j < s.index; ++j) {
      const double a = disc.norm_h(s.x->at(j) - s.y->at(j));
      const double b = disc.norm_h(s.x->at(j + 1) - s.y->at(j + 1));
      integral += 0.5 * dt * (a * a + b * b);
    }
    const double now = disc.norm_h(vx.now() - vy.now());
    const double rhs_x = Lf * (1.0 + disc.norm_h(s.z)) * std::sqrt(now * now + integral);
    report.min_slack_x = std::min(report.min_slack_x, rhs_x - lhs_x);
    if (rhs_x > 0.0) report.max_ratio_x = std::max(report.max_ratio_x, lhs_x / rhs_x);
    ++report.samples;
  }
  if (samples.empty()) report.min_slack_z = report.min_slack_x = 0.0;
  report.passed = report.min_slack_z >= -tol && report.min_slack_x >= -tol;
  return report;
}

IsaacsReport check_isaacs(const GelfandDiscretization& disc, const HamiltonianSpec& spec,
                          const std::vector<std::pair<PathView, Vec>>& samples,
                          double tol) {
  HamiltonianSpec upper = spec;
  upper.mode = HamiltonianMode::isaacs_minmax;
  HamiltonianSpec lower = spec;
  lower.mode = HamiltonianMode::isaacs_maxmin;
  IsaacsReport report;
  for (const auto& [view, z] : samples) {
    const double gap = std::abs(eval_F(disc, upper, view, z).value -
                                eval_F(disc, lower, view, z).value);
    report.max_gap = std::max(report.max_gap, gap);
    ++report.samples;
  }
  report.passed = report.max_gap <= tol;
  return report;
}

HamiltonianSpec coupled_bilinear_example() {
  HamiltonianSpec spec;
  spec.mode = HamiltonianMode::isaacs_minmax;
  spec.P = {-1.0, 1.0};
  spec.Q = {-1.0, 1.0};
  spec.f = [](const PathView& x, double, double) -> Vec { return Vec::Zero(x.path().dim()); };
  spec.ell = [](const PathView&, double p, double q) { return p * q; };
  return spec;
}

}  // namespace pathhj
