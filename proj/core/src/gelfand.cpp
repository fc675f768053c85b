#include "pathhj/gelfand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pathhj/errors.hpp"

namespace pathhj {
namespace {

void require_size(const GelfandDiscretization& disc, const Vec& v,
                  const char* what) {
  if (v.size() != disc.n) {
    throw InvalidArgument(std::string(what) + ": expected length " +
                          std::to_string(disc.n) + ", got " +
                          std::to_string(v.size()));
  }
}

// First differences D_j v = (v_{j+1} - v_j) / h, j = 0..n, zero boundary.
Vec differences(const Vec& v, double h) {
  const Eigen::Index n = v.size();
  Vec d(n + 1);
  d(0) = v(0) / h;
  for (Eigen::Index j = 1; j < n; ++j) d(j) = (v(j) - v(j - 1)) / h;
  d(n) = -v(n - 1) / h;
  return d;
}

}  // namespace

double GelfandDiscretization::inner(const Vec& x, const Vec& y) const {
  require_size(*this, x, "inner");
  require_size(*this, y, "inner");
  return (quadrature_weights.array() * x.array() * y.array()).sum();
}

double GelfandDiscretization::norm_h(const Vec& x) const {
  return std::sqrt(inner(x, x));
}

double GelfandDiscretization::norm_v(const Vec& x) const {
  require_size(*this, x, "norm_v");
  return std::sqrt(h * differences(x, h).squaredNorm());
}

double GelfandDiscretization::norm_vstar(const Vec& u) const {
  require_size(*this, u, "norm_vstar");
  // sup_w (u, w) / ||w|| is attained at the Riesz representative K^{-1} u.
  const Vec riesz = solve_laplacian(u);
  return std::sqrt(std::max(0.0, h * u.dot(riesz)));
}

Vec GelfandDiscretization::nodes() const {
  Vec xi(n);
  for (int i = 0; i < n; ++i) xi(i) = h * (i + 1);
  return xi;
}

Vec GelfandDiscretization::sine_mode(int k) const {
  const double scale = std::sqrt(2.0 / domain_length);
  Vec e(n);
  for (int i = 0; i < n; ++i) {
    e(i) = scale * std::sin(k * std::numbers::pi * h * (i + 1) / domain_length);
  }
  return e;
}

double GelfandDiscretization::laplacian_eigenvalue(int k) const {
  return 2.0 / (h * h) *
         (1.0 - std::cos(k * std::numbers::pi * h / domain_length));
}

Eigen::MatrixXd GelfandDiscretization::laplacian_matrix() const {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  const double s = 1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    k(i, i) = 2.0 * s;
    if (i > 0) k(i, i - 1) = -s;
    if (i + 1 < n) k(i, i + 1) = -s;
  }
  return k;
}

Vec GelfandDiscretization::apply_laplacian(const Vec& v) const {
  require_size(*this, v, "apply_laplacian");
  const double s = 1.0 / (h * h);
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    const double left = i > 0 ? v(i - 1) : 0.0;
    const double right = i + 1 < n ? v(i + 1) : 0.0;
    out(i) = s * (2.0 * v(i) - left - right);
  }
  return out;
}

Vec GelfandDiscretization::solve_laplacian(const Vec& rhs) const {
  require_size(*this, rhs, "solve_laplacian");
  const double s = 1.0 / (h * h);
  Tridiagonal k{Vec::Constant(n, -s), Vec::Constant(n, 2.0 * s),
                Vec::Constant(n, -s)};
  return k.solve(rhs);
}

GelfandDiscretization assemble_discretization(double domain_length, int n) {
  if (!(domain_length > 0.0) || !std::isfinite(domain_length)) {
    throw InvalidArgument("domain_length must be positive");
  }
  if (n < 1) throw InvalidArgument("n must be at least 1");
  GelfandDiscretization disc;
  disc.domain_length = domain_length;
  disc.n = n;
  disc.h = domain_length / (n + 1);
  disc.quadrature_weights = Vec::Constant(n, disc.h);
  const double lambda_min = disc.laplacian_eigenvalue(1);
  disc.poincare_constant = 1.0 / std::sqrt(lambda_min);
  disc.dual_embedding_constant = disc.poincare_constant;
  return disc;
}

Vec Tridiagonal::apply(const Vec& x) const {
  const Eigen::Index n = diag.size();
  Vec y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = diag(i) * x(i);
    if (i > 0) v += lower(i) * x(i - 1);
    if (i + 1 < n) v += upper(i) * x(i + 1);
    y(i) = v;
  }
  return y;
}

Vec Tridiagonal::solve(const Vec& rhs) const {
  const Eigen::Index n = diag.size();
  if (rhs.size() != n) throw InvalidArgument("Tridiagonal::solve: size");
  Vec c(n), d(n), x(n);
  double denom = diag(0);
  if (denom == 0.0) throw NumericalFailure("singular tridiagonal", 0.0, 0.0);
  c(0) = n > 1 ? upper(0) / denom : 0.0;
  d(0) = rhs(0) / denom;
  for (Eigen::Index i = 1; i < n; ++i) {
    denom = diag(i) - lower(i) * c(i - 1);
    if (denom == 0.0) throw NumericalFailure("singular tridiagonal", 0.0, 0.0);
    c(i) = i + 1 < n ? upper(i) / denom : 0.0;
    d(i) = (rhs(i) - lower(i) * d(i - 1)) / denom;
  }
  x(n - 1) = d(n - 1);
  for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = d(i) - c(i) * x(i + 1);
  return x;
}

const char* to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::linear_laplacian:
      return "linear_laplacian";
    case OperatorKind::p_laplacian:
      return "p_laplacian";
    case OperatorKind::zero:
      return "zero";
  }
  return "unknown";
}

OperatorKind operator_kind_from_string(const std::string& name) {
  if (name == "linear_laplacian") return OperatorKind::linear_laplacian;
  if (name == "p_laplacian") return OperatorKind::p_laplacian;
  if (name == "zero") return OperatorKind::zero;
  throw InvalidArgument("unknown operator kind '" + name + "'");
}

MonotoneOperator make_operator(OperatorKind kind, double p,
                               const GelfandDiscretization& disc) {
  MonotoneOperator op;
  op.kind = kind;
  switch (kind) {
    case OperatorKind::linear_laplacian:
      op.p = 2.0;
      op.c1 = 1.0;
      op.c2 = 1.0;
      break;
    case OperatorKind::p_laplacian:
      if (!(p >= 2.0)) throw InvalidArgument("p-Laplacian needs p >= 2");
      op.p = p;
      op.c2 = std::pow(disc.domain_length, 1.0 - p / 2.0);
      op.c1 = std::pow(disc.h, 1.0 - p / 2.0);
      break;
    case OperatorKind::zero:
      op.p = 2.0;
      op.c1 = 0.0;
      op.c2 = 0.0;
      break;
  }
  op.q = op.p / (op.p - 1.0);
  op.a1 = 0.0;
  return op;
}

Vec apply_operator(const MonotoneOperator& op, const GelfandDiscretization& disc,
                   double /*t*/, const Vec& v) {
  require_size(disc, v, "apply_operator");
  switch (op.kind) {
    case OperatorKind::linear_laplacian:
      return disc.apply_laplacian(v);
    case OperatorKind::zero:
      return Vec::Zero(disc.n);
    case OperatorKind::p_laplacian: {
      const Vec d = differences(v, disc.h);
      Vec flux(d.size());
      for (Eigen::Index j = 0; j < d.size(); ++j) {
        flux(j) = std::pow(std::abs(d(j)), op.p - 2.0) * d(j);
      }
      Vec out(disc.n);
      for (int i = 0; i < disc.n; ++i) out(i) = (flux(i) - flux(i + 1)) / disc.h;
      return out;
    }
  }
  return Vec::Zero(disc.n);
}

Tridiagonal operator_jacobian(const MonotoneOperator& op,
                              const GelfandDiscretization& disc, const Vec& v) {
  require_size(disc, v, "operator_jacobian");
  const int n = disc.n;
  Tridiagonal jac{Vec::Zero(n), Vec::Zero(n), Vec::Zero(n)};
  if (op.kind == OperatorKind::zero) return jac;
  const double h2 = disc.h * disc.h;
  Vec slope(n + 1);
  if (op.kind == OperatorKind::linear_laplacian) {
    slope.setOnes();
  } else {
    const Vec d = differences(v, disc.h);
    for (int j = 0; j <= n; ++j) {
      slope(j) = (op.p - 1.0) * std::pow(std::abs(d(j)), op.p - 2.0);
    }
  }
  for (int i = 0; i < n; ++i) {
    jac.diag(i) = (slope(i) + slope(i + 1)) / h2;
    jac.lower(i) = -slope(i) / h2;
    jac.upper(i) = -slope(i + 1) / h2;
  }
  return jac;
}

double operator_potential(const MonotoneOperator& op,
                          const GelfandDiscretization& disc, const Vec& v) {
  if (op.kind == OperatorKind::zero) return 0.0;
  const Vec d = differences(v, disc.h);
  const double p = op.kind == OperatorKind::linear_laplacian ? 2.0 : op.p;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < d.size(); ++j) sum += std::pow(std::abs(d(j)), p);
  return disc.h * sum / p;
}

MonotonicityReport check_monotonicity(
    const MonotoneOperator& op, const GelfandDiscretization& disc,
    const std::vector<std::pair<Vec, Vec>>& sample_pairs, double tol) {
  MonotonicityReport report;
  report.tolerance = tol;
  report.samples = sample_pairs.size();
  double min_pairing = std::numeric_limits<double>::infinity();
  for (const auto& [v, w] : sample_pairs) {
    const Vec diff = apply_operator(op, disc, 0.0, v) - apply_operator(op, disc, 0.0, w);
    min_pairing = std::min(min_pairing, disc.duality(diff, v - w));
  }
  report.min_pairing = sample_pairs.empty() ? 0.0 : min_pairing;
  report.passed = report.min_pairing >= -tol;
  return report;
}

CoercivityReport check_coercivity_boundedness(const MonotoneOperator& op,
                                              const GelfandDiscretization& disc,
                                              const std::vector<Vec>& samples,
                                              double tol) {
  CoercivityReport report;
  report.samples = samples.size();
  report.min_coercivity_slack = std::numeric_limits<double>::infinity();
  report.min_boundedness_slack = std::numeric_limits<double>::infinity();
  report.measured_c2 = std::numeric_limits<double>::infinity();
  report.measured_c1 = 0.0;
  bool saw_nonzero = false;
  for (const Vec& v : samples) {
    const Vec av = apply_operator(op, disc, 0.0, v);
    const double vn = disc.norm_v(v);
    const double pairing = disc.duality(av, v);
    const double dual = disc.norm_vstar(av);
    report.min_coercivity_slack =
        std::min(report.min_coercivity_slack, pairing - op.c2 * std::pow(vn, op.p));
    report.min_boundedness_slack =
        std::min(report.min_boundedness_slack,
                 op.a1 + op.c1 * std::pow(vn, op.p - 1.0) - dual);
    if (vn > 0.0) {
      saw_nonzero = true;
      report.measured_c2 = std::min(report.measured_c2, pairing / std::pow(vn, op.p));
      report.measured_c1 =
          std::max(report.measured_c1, dual / std::pow(vn, op.p - 1.0));
    }
  }
  if (!saw_nonzero) report.measured_c2 = 0.0;
  // Coercivity demands a strictly positive constant: the declared c2 must be
  // positive and the measured ratio must not collapse to zero.
  report.coercive = op.c2 > 0.0 && report.min_coercivity_slack >= -tol &&
                    report.measured_c2 > tol;
  report.bounded = report.min_boundedness_slack >= -tol;
  return report;
}

NonCompactnessReport non_compactness_example(int grid_points, int max_mode) {
  const double length = 2.0 * std::numbers::pi;
  const GelfandDiscretization disc = assemble_discretization(length, grid_points);
  if (max_mode < 1 || max_mode > grid_points) {
    throw InvalidArgument("non_compactness_example: need 1 <= max_mode <= n");
  }
  const Vec xi = disc.nodes();
  // (sin(k .), xi / l) decays like 1 / k: weak convergence to 0.
  const Vec test = xi / length;
  NonCompactnessReport report;
  report.forcing_admissible = true;
  for (int k = 1; k <= max_mode; ++k) {
    Vec mode(disc.n);
    for (int i = 0; i < disc.n; ++i) {
      mode(i) = std::sin(k * xi(i)) / std::sqrt(std::numbers::pi);
    }
    // x_k(1) = mode, forcing f_k = mode, |f_k| <= 1 * (1 + sup |x_k|).
    const double terminal = disc.norm_h(mode);
    report.modes.push_back(k);
    report.terminal_norms.push_back(terminal);
    report.pairings_with_test.push_back(disc.inner(mode, test));
    // int_0^1 t^2 ||mode||^2 dt = ||mode||^2 / 3.
    report.l2v_norms.push_back(disc.norm_v(mode) / std::sqrt(3.0));
    // The tightest instant is t = 0, where sup |x_k| = 0.
    if (terminal > report.forcing_bound_L + 1e-12) report.forcing_admissible = false;
  }
  return report;
}

}  // namespace pathhj
