#include "polyreg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "polyreg/errors.hpp"

namespace polyreg {

Grid::Grid(double xmin, double xmax, double ymin, double ymax, int nx, int ny)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), nx_(nx), ny_(ny) {
  if (nx < 2 || ny < 2) throw DomainError("grid needs at least 2 nodes per axis");
  if (!(xmax > xmin) || !(ymax > ymin)) throw DomainError("grid rectangle is empty");
  hx_ = (xmax - xmin) / (nx - 1);
  hy_ = (ymax - ymin) / (ny - 1);
}

double Grid::diameter() const noexcept { return std::hypot(xmax_ - xmin_, ymax_ - ymin_); }

Point Grid::cell_center(std::size_t c) const noexcept {
  const int ci = static_cast<int>(c % cells_x());
  const int cj = static_cast<int>(c / cells_x());
  return {xmin_ + (ci + 0.5) * hx_, ymin_ + (cj + 0.5) * hy_};
}

Domain::Domain(const Grid& grid, std::vector<std::uint8_t> active, std::optional<Disk> disk)
    : grid_(grid), active_(std::move(active)), disk_(disk) {
  if (active_.size() != grid_.num_cells()) {
    throw DomainError("mask has " + std::to_string(active_.size()) + " entries, grid has " +
                      std::to_string(grid_.num_cells()) + " cells");
  }
  node_weights_.assign(grid_.num_nodes(), 0.0);
  const double quarter = 0.25 * grid_.cell_area();
  for (int cj = 0; cj < grid_.cells_y(); ++cj) {
    for (int ci = 0; ci < grid_.cells_x(); ++ci) {
      if (!active_[grid_.cell_index(ci, cj)]) continue;
      ++active_count_;
      node_weights_[grid_.node_index(ci, cj)] += quarter;
      node_weights_[grid_.node_index(ci + 1, cj)] += quarter;
      node_weights_[grid_.node_index(ci, cj + 1)] += quarter;
      node_weights_[grid_.node_index(ci + 1, cj + 1)] += quarter;
    }
  }
}

Domain Domain::full(const Grid& grid) {
  return Domain(grid, std::vector<std::uint8_t>(grid.num_cells(), 1), std::nullopt);
}

Domain Domain::disk(const Grid& grid, const Disk& disk) {
  if (!(disk.radius > 0.0)) throw DomainError("disk radius must be positive");
  std::vector<std::uint8_t> mask(grid.num_cells(), 0);
  for (std::size_t c = 0; c < mask.size(); ++c) {
    mask[c] = (grid.cell_center(c) - disk.center).norm() < disk.radius ? 1 : 0;
  }
  return Domain(grid, std::move(mask), disk);
}

Domain Domain::masked(const Grid& grid, std::vector<std::uint8_t> mask) {
  for (auto& m : mask) m = m ? 1 : 0;
  return Domain(grid, std::move(mask), std::nullopt);
}

bool Domain::node_in_closure(std::size_t k) const {
  if (disk_) return (grid_.node(k) - disk_->center).norm() <= disk_->radius;
  return node_active(k);
}

double Domain::distance_outside(const Point& p) const {
  if (disk_) return std::max(0.0, (p - disk_->center).norm() - disk_->radius);
  const Grid& g = grid_;
  const double dx = std::max({g.xmin() - p.x(), 0.0, p.x() - g.xmax()});
  const double dy = std::max({g.ymin() - p.y(), 0.0, p.y() - g.ymax()});
  if (dx > 0.0 || dy > 0.0) return std::hypot(dx, dy);
  // Inside the rectangle: 0 if p lies in a closed active cell, otherwise the
  // distance to the nearest one.
  const auto cell_distance = [&](int cx, int cy) {
    const double x0 = g.xmin() + cx * g.hx();
    const double y0 = g.ymin() + cy * g.hy();
    const double ex = std::max({x0 - p.x(), 0.0, p.x() - (x0 + g.hx())});
    const double ey = std::max({y0 - p.y(), 0.0, p.y() - (y0 + g.hy())});
    return std::hypot(ex, ey);
  };
  const int ci = static_cast<int>(std::floor((p.x() - g.xmin()) / g.hx()));
  const int cj = static_cast<int>(std::floor((p.y() - g.ymin()) / g.hy()));
  for (int cy = std::max(cj - 1, 0); cy <= std::min(cj, g.cells_y() - 1); ++cy) {
    for (int cx = std::max(ci - 1, 0); cx <= std::min(ci, g.cells_x() - 1); ++cx) {
      if (active_[g.cell_index(cx, cy)] && cell_distance(cx, cy) == 0.0) return 0.0;
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (int cy = 0; cy < g.cells_y(); ++cy) {
    for (int cx = 0; cx < g.cells_x(); ++cx) {
      if (active_[g.cell_index(cx, cy)]) best = std::min(best, cell_distance(cx, cy));
    }
  }
  return best;
}

Point Domain::project(const Point& p) const {
  if (disk_) {
    const Point d = p - disk_->center;
    const double r = d.norm();
    if (r <= disk_->radius) return p;
    return disk_->center + (disk_->radius / r) * d;
  }
  return {std::clamp(p.x(), grid_.xmin(), grid_.xmax()),
          std::clamp(p.y(), grid_.ymin(), grid_.ymax())};
}

Eigen::Matrix2d Domain::project_jacobian(const Point& p) const {
  if (disk_) {
    const Point d = p - disk_->center;
    const double r = d.norm();
    if (r <= disk_->radius) return Eigen::Matrix2d::Identity();
    const Point e = d / r;
    return (disk_->radius / r) * (Eigen::Matrix2d::Identity() - e * e.transpose());
  }
  Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
  j(0, 0) = (p.x() > grid_.xmin() && p.x() < grid_.xmax()) ? 1.0 : 0.0;
  j(1, 1) = (p.y() > grid_.ymin() && p.y() < grid_.ymax()) ? 1.0 : 0.0;
  return j;
}

}  // namespace polyreg
