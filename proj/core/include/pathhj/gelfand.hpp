#pragma once

// Finite-dimensional stand-in for V c H c V*: interior nodes of a uniform
// grid on (0, l) with homogeneous Dirichlet data. H carries the weighted
// l2 product (x,y) = sum_i w_i x_i y_i with w_i = h, V the discrete H^1_0
// seminorm, and V* is represented in H-coordinates so that the duality
// pairing <u*, v> equals (u*, v).

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace pathhj {

using Vec = Eigen::VectorXd;

struct GelfandDiscretization {
  double domain_length = 0.0;
  int n = 0;
  double h = 0.0;
  Vec quadrature_weights;
  /// |v| <= C1 ||v||.
  double poincare_constant = 0.0;
  /// ||v||_* <= C5 |v|.
  double dual_embedding_constant = 0.0;

  double inner(const Vec& x, const Vec& y) const;
  double norm_h(const Vec& x) const;
  double norm_v(const Vec& x) const;
  /// Norm dual to norm_v, through the discrete Riesz map.
  double norm_vstar(const Vec& u) const;
  double duality(const Vec& u, const Vec& v) const { return inner(u, v); }

  /// Grid nodes xi_1 .. xi_n.
  Vec nodes() const;
  /// H-orthonormal discrete sine mode sqrt(2/l) sin(k pi xi / l).
  Vec sine_mode(int k) const;
  /// Eigenvalue of the discrete Dirichlet Laplacian for sine_mode(k).
  double laplacian_eigenvalue(int k) const;

  /// Dense second-difference matrix tridiag(-1, 2, -1) / h^2.
  Eigen::MatrixXd laplacian_matrix() const;
  Vec apply_laplacian(const Vec& v) const;
  /// Solves the discrete Dirichlet Laplacian K u = rhs.
  Vec solve_laplacian(const Vec& rhs) const;
};

GelfandDiscretization assemble_discretization(double domain_length, int n);

/// Tridiagonal matrix in band storage; lower[0] and upper[n-1] unused.
struct Tridiagonal {
  Vec lower;
  Vec diag;
  Vec upper;

  Vec apply(const Vec& x) const;
  /// Thomas algorithm. The matrices built here are diagonally dominant.
  Vec solve(const Vec& rhs) const;
};

enum class OperatorKind { linear_laplacian, p_laplacian, zero };

const char* to_string(OperatorKind kind);
OperatorKind operator_kind_from_string(const std::string& name);

/// A(t, .) together with the constants of its growth hypotheses. For the
/// p-Laplacian on a uniform grid the constants follow from discrete Hoelder
/// and inverse inequalities: c2 = l^{1-p/2}, c1 = h^{1-p/2}.
struct MonotoneOperator {
  OperatorKind kind = OperatorKind::linear_laplacian;
  double p = 2.0;
  double q = 2.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double a1 = 0.0;
};

MonotoneOperator make_operator(OperatorKind kind, double p,
                               const GelfandDiscretization& disc);

Vec apply_operator(const MonotoneOperator& op, const GelfandDiscretization& disc,
                   double t, const Vec& v);

/// Jacobian of apply_operator at v (tridiagonal for every shipped kind).
Tridiagonal operator_jacobian(const MonotoneOperator& op,
                              const GelfandDiscretization& disc, const Vec& v);

/// Convex potential Phi with grad Phi = A: (h/p) sum_j |D_j v|^p.
double operator_potential(const MonotoneOperator& op,
                          const GelfandDiscretization& disc, const Vec& v);

struct MonotonicityReport {
  std::size_t samples = 0;
  double min_pairing = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

MonotonicityReport check_monotonicity(
    const MonotoneOperator& op, const GelfandDiscretization& disc,
    const std::vector<std::pair<Vec, Vec>>& sample_pairs, double tol = 1e-8);

struct CoercivityReport {
  std::size_t samples = 0;
  /// min over samples of <A v, v> - c2 ||v||^p (declared c2).
  double min_coercivity_slack = 0.0;
  /// min over samples of a1 + c1 ||v||^{p-1} - ||A v||_*.
  double min_boundedness_slack = 0.0;
  /// min over samples of <A v, v> / ||v||^p.
  double measured_c2 = 0.0;
  /// max over samples of ||A v||_* / ||v||^{p-1}.
  double measured_c1 = 0.0;
  bool coercive = false;
  bool bounded = false;
};

CoercivityReport check_coercivity_boundedness(const MonotoneOperator& op,
                                              const GelfandDiscretization& disc,
                                              const std::vector<Vec>& samples,
                                              double tol = 1e-8);

/// The A = 0 counterexample on (0, 2 pi): x_k(t) = t sin(k xi) / sqrt(pi)
/// with forcing sin(k xi) / sqrt(pi). |x_k(1)| stays 1 while the pairing with
/// any fixed test vector vanishes and the L2(0,1;V) norm grows like k.
struct NonCompactnessReport {
  std::vector<int> modes;
  std::vector<double> terminal_norms;
  std::vector<double> pairings_with_test;
  std::vector<double> l2v_norms;
  double forcing_bound_L = 1.0;
  bool forcing_admissible = false;
};

NonCompactnessReport non_compactness_example(int grid_points, int max_mode);

}  // namespace pathhj
