#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "polyreg/grid.hpp"

namespace polyreg {

// Nodal image on a grid, read between nodes by bilinear interpolation. Points
// outside the grid rectangle are clamped to its boundary first.
class ScalarImage {
 public:
  ScalarImage(const Grid& grid, std::vector<double> samples);
  static ScalarImage constant(const Grid& grid, double value);
  static ScalarImage from_function(const Grid& grid, const std::function<double(const Point&)>& fn);

  const Grid& grid() const noexcept { return grid_; }
  const std::vector<double>& samples() const noexcept { return samples_; }
  std::vector<double>& samples() noexcept { return samples_; }

  double sample(const Point& p) const;
  // Value and gradient of the interpolant. On cell edges the cell with the
  // larger index supplies the gradient; clamped directions get 0.
  double sample(const Point& p, Eigen::Vector2d& gradient) const;

 private:
  Grid grid_;
  std::vector<double> samples_;
};

struct GaussianBlob {
  Point center{0.0, 0.0};
  double amplitude = 1.0;
  double sigma = 0.2;
};

double blob_value(const std::vector<GaussianBlob>& blobs, const Point& p);
ScalarImage render_blobs(const Grid& grid, const std::vector<GaussianBlob>& blobs);
// `count` blobs with centers inside the disk of radius 0.6 * radius around
// `center`, amplitudes in [0.5, 1] and widths in [0.15, 0.3] * radius.
std::vector<GaussianBlob> random_blobs(int count, std::uint64_t seed, const Disk& region);

}  // namespace polyreg
