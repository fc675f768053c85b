#include "pathhj/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "pathhj/errors.hpp"
#include "pathhj/format.hpp"
#include "pathhj/random.hpp"

namespace pathhj {
namespace {

RhsFunction extreme_forcing(const GelfandDiscretization& disc, double L, Vec direction) {
  return [&disc, L, direction = std::move(direction)](const PathView& view) -> Vec {
    return L * (1.0 + view.running_sup(disc)) * direction;
  };
}

}  // namespace

TrajectoryBundle sample_bundle(const GelfandDiscretization& disc,
                               const MonotoneOperator& op, double t0,
                               const Path& prefix, double L, std::size_t size,
                               std::uint64_t seed, int modes,
                               const StepOptions& options) {
  if (size < 1) throw InvalidArgument("sample_bundle: size must be >= 1");
  if (L < 0.0) throw InvalidArgument("sample_bundle: L must be nonnegative");
  if (modes < 1 || modes > disc.n) throw InvalidArgument("sample_bundle: bad mode count");
  if (op.kind == OperatorKind::zero) {
    throw InvalidArgument("sample_bundle: operator is not coercive");
  }
  TrajectoryBundle bundle;
  bundle.t0 = t0;
  bundle.prefix = prefix;
  bundle.L = L;
  bundle.seed = seed;
  bundle.modes = modes;
  if (L == 0.0) size = 1;

  std::vector<Vec> basis;
  for (int j = 1; j <= modes; ++j) basis.push_back(disc.sine_mode(j));

  const auto unforced = [&disc](const PathView&) -> Vec { return Vec::Zero(disc.n); };
  for (std::size_t j = 0; j < size; ++j) {
    RhsFunction rhs;
    if (j == 0) {
      rhs = unforced;
    } else if (j <= 2 * static_cast<std::size_t>(modes)) {
      const Vec& e = basis[(j - 1) / 2];
      rhs = extreme_forcing(disc, L, (j % 2 == 1) ? e : Vec(-e));
    } else {
      auto rng = std::make_shared<std::mt19937_64>(seed + j);
      rhs = [&disc, &basis, L, rng](const PathView& view) -> Vec {
        Vec d = Vec::Zero(disc.n);
        double norm2 = 0.0;
        std::vector<double> c(basis.size());
        do {
          norm2 = 0.0;
          for (auto& ci : c) {
            ci = standard_normal(*rng);
            norm2 += ci * ci;
          }
        } while (norm2 == 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) d += (c[i] / std::sqrt(norm2)) * basis[i];
        const double theta = uniform01(*rng);
        return theta * L * (1.0 + view.running_sup(disc)) * d;
      };
    }
    bundle.members.push_back(
        solve_ivp(disc, op, t0, prefix, feedback_rhs(rhs, L), options));
  }
  return bundle;
}

bool forcing_admissible(const GelfandDiscretization& disc, const Path& x, double L,
                        double tol) {
  if (!x.forcing) return x.birth_index >= x.grid.steps;
  double m = 0.0;
  for (std::size_t i = 0; i < x.grid.steps; ++i) {
    m = std::max(m, disc.norm_h(x.at(i)));
    if (i < x.birth_index) continue;
    const double g = disc.norm_h(x.forcing->col(static_cast<Eigen::Index>(i)));
    if (g > L * (1.0 + m) + tol) return false;
  }
  return true;
}

PseudometricReport check_equiv_pseudometrics(const GelfandDiscretization& disc,
                                             const MonotoneOperator& op,
                                             const TrajectoryBundle& bundle, double t) {
  PseudometricReport report;
  if (bundle.members.empty()) throw InvalidArgument("empty bundle");
  const TimeGrid& grid = bundle.prefix.grid;
  const std::size_t i0 = grid.index_of(bundle.t0);
  const std::size_t it = grid.index_of(t);
  const double dt = grid.dt();
  report.constant_C = apriori_constants(disc, op, bundle.t0, bundle.prefix, bundle.L).C;
  report.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < bundle.size(); ++a) {
    for (std::size_t b = a + 1; b < bundle.size(); ++b) {
      const Path& x = bundle.members[a];
      const Path& y = bundle.members[b];
      double sup2 = 0.0;
      double l2 = 0.0;
      for (std::size_t i = 0; i <= it; ++i) {
        const Vec e = x.at(i) - y.at(i);
        const double e2 = disc.inner(e, e);
        sup2 = std::max(sup2, e2);
        if (i > i0) l2 += dt * e2;
      }
      const double rhs = 4.0 * report.constant_C * std::sqrt(l2);
      ++report.pairs;
      report.min_slack = std::min(report.min_slack, rhs - sup2);
      if (rhs > 0.0) report.max_ratio = std::max(report.max_ratio, sup2 / rhs);
    }
  }
  if (report.pairs == 0) report.min_slack = 0.0;
  report.passed = report.min_slack >= -1e-12;
  return report;
}

double equicontinuity_constant(const GelfandDiscretization& disc,
                               const TrajectoryBundle& bundle) {
  double k = 0.0;
  for (const Path& x : bundle.members) {
    const double dt = x.grid.dt();
    for (std::size_t i = 0; i + 1 < x.nodes(); ++i) {
      k = std::max(k, disc.norm_h(x.at(i + 1) - x.at(i)) / std::sqrt(dt));
    }
  }
  return k;
}

void write_path_csv(std::ostream& out, const Path& path) {
  const int n = path.dim();
  out << 't';
  for (int j = 1; j <= n; ++j) out << ",x" << j;
  for (int j = 1; j <= n; ++j) out << ",f" << j;
  out << '\n';
  for (std::size_t i = 0; i < path.nodes(); ++i) {
    out << format_double(path.grid.time(i));
    for (int j = 0; j < n; ++j) {
      out << ',' << format_double(path.values(j, static_cast<Eigen::Index>(i)));
    }
    for (int j = 0; j < n; ++j) {
      out << ',';
      if (path.forcing && i < path.grid.steps) {
        out << format_double((*path.forcing)(j, static_cast<Eigen::Index>(i)));
      }
    }
    out << '\n';
  }
}

std::string bundle_manifest_json(const TrajectoryBundle& bundle) {
  std::ostringstream os;
  os << "{\"t0\": " << format_double(bundle.t0) << ", \"L\": " << format_double(bundle.L)
     << ", \"seed\": " << bundle.seed << ", \"modes\": " << bundle.modes
     << ", \"size\": " << bundle.size() << ", \"T\": " << format_double(bundle.prefix.grid.T)
     << ", \"steps\": " << bundle.prefix.grid.steps << "}";
  return os.str();
}

}  // namespace pathhj
