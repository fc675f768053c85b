#include "pathhj/pathspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pathhj/errors.hpp"

namespace pathhj {
namespace {
constexpr double kGridSnap = 1e-9;
}

TimeGrid::TimeGrid(double horizon, std::size_t n_steps) : T(horizon), steps(n_steps) {
  if (!(horizon > 0.0)) throw InvalidArgument("TimeGrid: horizon must be positive");
  if (n_steps == 0) throw InvalidArgument("TimeGrid: need at least one step");
}

bool TimeGrid::contains(double t) const {
  if (t < -kGridSnap * T || t > T * (1.0 + kGridSnap)) return false;
  const double k = std::round(t / dt());
  return std::abs(t - k * dt()) <= kGridSnap * std::max(1.0, T);
}

std::size_t TimeGrid::index_of(double t) const {
  if (!contains(t)) {
    throw InvalidArgument("time " + std::to_string(t) + " is not a grid node");
  }
  return static_cast<std::size_t>(std::llround(t / dt()));
}

std::size_t TimeGrid::floor_index(double t) const {
  if (t <= 0.0) return 0;
  if (t >= T) return steps;
  const double k = std::floor(t / dt() + kGridSnap);
  return std::min(steps, static_cast<std::size_t>(k));
}

Path::Path(const TimeGrid& g, int dim)
    : grid(g), values(Eigen::MatrixXd::Zero(dim, static_cast<Eigen::Index>(g.nodes()))) {}

Path Path::constant(const TimeGrid& grid, const Vec& state) {
  Path path(grid, static_cast<int>(state.size()));
  path.values.colwise() = state;
  return path;
}

Vec Path::value_at(double t) const { return at(grid.floor_index(t)); }

Eigen::MatrixXd& Path::ensure_forcing() {
  if (!forcing) {
    forcing = Eigen::MatrixXd::Zero(values.rows(), static_cast<Eigen::Index>(grid.steps));
  }
  return *forcing;
}

Vec PathView::at(std::size_t j) const {
  if (j > index_) {
    throw InvalidArgument("non-anticipation violated: read index " +
                          std::to_string(j) + " at index " + std::to_string(index_));
  }
  return path_->at(j);
}

Vec PathView::delayed(double tau) const {
  return path_->at(grid().floor_index(std::max(0.0, time() - tau)));
}

double PathView::running_sup(const GelfandDiscretization& disc) const {
  double m = 0.0;
  for (std::size_t j = 0; j <= index_; ++j) m = std::max(m, disc.norm_h(path_->at(j)));
  return m;
}

double PathView::integral_sq(const GelfandDiscretization& disc) const {
  double sum = 0.0;
  const double dt = grid().dt();
  for (std::size_t j = 0; j < index_; ++j) {
    const double a = disc.inner(path_->at(j), path_->at(j));
    const double b = disc.inner(path_->at(j + 1), path_->at(j + 1));
    sum += 0.5 * dt * (a + b);
  }
  return sum;
}

Vec PathView::integral() const {
  Vec sum = Vec::Zero(path_->dim());
  const double dt = grid().dt();
  for (std::size_t j = 0; j < index_; ++j) {
    sum += 0.5 * dt * (path_->at(j) + path_->at(j + 1));
  }
  return sum;
}

double sup_norm(const GelfandDiscretization& disc, const Path& x) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.nodes(); ++i) m = std::max(m, disc.norm_h(x.at(i)));
  return m;
}

double d_infty(const GelfandDiscretization& disc, double t, const Path& x,
               double s, const Path& y) {
  if (!(x.grid == y.grid)) throw InvalidArgument("d_infty: paths on different grids");
  const std::size_t it = x.grid.floor_index(t);
  const std::size_t is = y.grid.floor_index(s);
  double m = 0.0;
  for (std::size_t r = 0; r < x.nodes(); ++r) {
    m = std::max(m, disc.norm_h(x.at(std::min(r, it)) - y.at(std::min(r, is))));
  }
  return std::abs(t - s) + m;
}

Path stop(const Path& x, double t) {
  const std::size_t i = x.grid.index_of(t);
  Path out = x;
  for (std::size_t j = i + 1; j < x.nodes(); ++j) {
    out.values.col(static_cast<Eigen::Index>(j)) = x.values.col(static_cast<Eigen::Index>(i));
  }
  out.forcing.reset();
  return out;
}

}  // namespace pathhj
