#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace polyreg {

using Point = Eigen::Vector2d;

// Regular node grid on the rectangle [xmin, xmax] x [ymin, ymax]. Nodes are
// numbered row-major, k = j * nx + i with i along x; cells likewise with
// (nx - 1) cells per row.
class Grid {
 public:
  Grid(double xmin, double xmax, double ymin, double ymax, int nx, int ny);

  double xmin() const noexcept { return xmin_; }
  double xmax() const noexcept { return xmax_; }
  double ymin() const noexcept { return ymin_; }
  double ymax() const noexcept { return ymax_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  int cells_x() const noexcept { return nx_ - 1; }
  int cells_y() const noexcept { return ny_ - 1; }
  double hx() const noexcept { return hx_; }
  double hy() const noexcept { return hy_; }
  double cell_area() const noexcept { return hx_ * hy_; }
  std::size_t num_nodes() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t num_cells() const noexcept {
    return static_cast<std::size_t>(cells_x()) * cells_y();
  }
  double diameter() const noexcept;

  std::size_t node_index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * nx_ + i;
  }
  std::size_t cell_index(int ci, int cj) const noexcept {
    return static_cast<std::size_t>(cj) * cells_x() + ci;
  }
  Point node(int i, int j) const noexcept { return {xmin_ + i * hx_, ymin_ + j * hy_}; }
  Point node(std::size_t k) const noexcept {
    return node(static_cast<int>(k % nx_), static_cast<int>(k / nx_));
  }
  Point cell_center(std::size_t c) const noexcept;

  bool operator==(const Grid&) const = default;

 private:
  double xmin_, xmax_, ymin_, ymax_;
  int nx_, ny_;
  double hx_, hy_;
};

struct Disk {
  Point center{0.0, 0.0};
  double radius = 1.0;
  bool operator==(const Disk&) const = default;
};

// Computational domain: a grid plus a mask of active cells. Disk domains also
// remember the exact disk, which defines the closed domain used for
// admissibility checks and projection; otherwise the closed domain is the
// union of active cells and projection clamps to the bounding rectangle.
class Domain {
 public:
  static Domain full(const Grid& grid);
  // Cells whose centers lie inside the disk are active.
  static Domain disk(const Grid& grid, const Disk& disk);
  // mask has one 0/1 entry per cell.
  static Domain masked(const Grid& grid, std::vector<std::uint8_t> mask);

  const Grid& grid() const noexcept { return grid_; }
  const std::vector<std::uint8_t>& mask() const noexcept { return active_; }
  bool cell_active(std::size_t c) const noexcept { return active_[c] != 0; }
  const std::optional<Disk>& disk_geometry() const noexcept { return disk_; }
  std::size_t active_cells() const noexcept { return active_count_; }
  double area() const noexcept { return active_count_ * grid_.cell_area(); }

  // Node quadrature weights: each active cell gives a quarter of its area to
  // each corner. Sums to area().
  const std::vector<double>& node_weights() const noexcept { return node_weights_; }
  // Nodes carrying data: those with positive weight.
  bool node_active(std::size_t k) const noexcept { return node_weights_[k] > 0.0; }

  // Is node k a point of the closed domain?
  bool node_in_closure(std::size_t k) const;
  // Distance from p to the closed domain (0 inside).
  double distance_outside(const Point& p) const;
  // Nearest point of the projection set (disk, or bounding rectangle).
  Point project(const Point& p) const;
  // Derivative of project() at p.
  Eigen::Matrix2d project_jacobian(const Point& p) const;

  bool operator==(const Domain& o) const {
    return grid_ == o.grid_ && active_ == o.active_ && disk_ == o.disk_;
  }

 private:
  Domain(const Grid& grid, std::vector<std::uint8_t> active, std::optional<Disk> disk);

  Grid grid_;
  std::vector<std::uint8_t> active_;
  std::optional<Disk> disk_;
  std::size_t active_count_ = 0;
  std::vector<double> node_weights_;
};

}  // namespace polyreg
