#pragma once

// Time-gridded H-valued paths and the non-anticipating path metric.

#include <cstddef>
#include <optional>
#include <vector>

#include "pathhj/gelfand.hpp"

namespace pathhj {

/// Uniform grid 0 = t_0 < ... < t_N = T.
struct TimeGrid {
  double T = 1.0;
  std::size_t steps = 1;

  TimeGrid() = default;
  TimeGrid(double horizon, std::size_t steps);

  double dt() const { return T / static_cast<double>(steps); }
  std::size_t nodes() const { return steps + 1; }
  double time(std::size_t i) const { return T * static_cast<double>(i) / steps; }
  bool contains(double t) const;
  /// Index of a grid time; throws InvalidArgument if t is off-grid.
  std::size_t index_of(double t) const;
  /// Largest index with time(i) <= t (left-constant interpolation).
  std::size_t floor_index(double t) const;

  bool operator==(const TimeGrid& other) const = default;
};

/// A path sampled on a TimeGrid. Column i of `values` is x(t_i); column i of
/// `forcing` is f^x on [t_i, t_{i+1}). Before `birth_index` the path is the
/// prescribed history x_0.
struct Path {
  TimeGrid grid;
  Eigen::MatrixXd values;
  std::optional<Eigen::MatrixXd> forcing;
  std::size_t birth_index = 0;

  Path() = default;
  Path(const TimeGrid& grid, int dim);

  static Path constant(const TimeGrid& grid, const Vec& state);

  int dim() const { return static_cast<int>(values.rows()); }
  std::size_t nodes() const { return static_cast<std::size_t>(values.cols()); }
  Vec at(std::size_t i) const { return values.col(static_cast<Eigen::Index>(i)); }
  /// x(t) with left-constant interpolation between grid nodes.
  Vec value_at(double t) const;
  Eigen::MatrixXd& ensure_forcing();
};

/// Read access to a path restricted to [0, t_index]. Everything a strategy,
/// dynamics map or cost sees goes through this view, so reading the future
/// is a programming error that throws.
class PathView {
 public:
  PathView(const Path& path, std::size_t index) : path_(&path), index_(index) {}

  std::size_t index() const { return index_; }
  double time() const { return path_->grid.time(index_); }
  const TimeGrid& grid() const { return path_->grid; }
  const Path& path() const { return *path_; }

  Vec now() const { return path_->at(index_); }
  Vec at(std::size_t j) const;
  /// x((t - tau) v 0), left-constant on the grid.
  Vec delayed(double tau) const;
  /// sup_{s <= t} |x(s)|.
  double running_sup(const GelfandDiscretization& disc) const;
  /// int_0^t |x(s)|^2 ds by the trapezoid rule.
  double integral_sq(const GelfandDiscretization& disc) const;
  /// int_0^t x(s) ds by the trapezoid rule.
  Vec integral() const;

 private:
  const Path* path_;
  std::size_t index_;
};

double sup_norm(const GelfandDiscretization& disc, const Path& x);

/// |t - s| + max_r |x(r ^ t) - y(r ^ s)| over grid nodes r.
double d_infty(const GelfandDiscretization& disc, double t, const Path& x,
               double s, const Path& y);

/// x(. ^ t): frozen at x(t) after t. Drops stored forcing.
Path stop(const Path& x, double t);

}  // namespace pathhj
