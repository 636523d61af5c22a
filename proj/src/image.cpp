#include "polyreg/image.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "polyreg/errors.hpp"

namespace polyreg {

ScalarImage::ScalarImage(const Grid& grid, std::vector<double> samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (samples_.size() != grid_.num_nodes()) {
    throw DomainError("image has " + std::to_string(samples_.size()) + " samples, grid has " +
                      std::to_string(grid_.num_nodes()) + " nodes");
  }
}

ScalarImage ScalarImage::constant(const Grid& grid, double value) {
  return ScalarImage(grid, std::vector<double>(grid.num_nodes(), value));
}

ScalarImage ScalarImage::from_function(const Grid& grid,
                                       const std::function<double(const Point&)>& fn) {
  std::vector<double> s(grid.num_nodes());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = fn(grid.node(k));
  return ScalarImage(grid, std::move(s));
}

double ScalarImage::sample(const Point& p) const {
  Eigen::Vector2d unused;
  return sample(p, unused);
}

double ScalarImage::sample(const Point& p, Eigen::Vector2d& gradient) const {
  const Grid& g = grid_;
  const double x = std::clamp(p.x(), g.xmin(), g.xmax());
  const double y = std::clamp(p.y(), g.ymin(), g.ymax());
  // Snap to node lines so node positions reproduce node samples exactly.
  const auto snap = [](double f) {
    const double r = std::round(f);
    return std::abs(f - r) < 1e-9 ? r : f;
  };
  const double fx = snap((x - g.xmin()) / g.hx());
  const double fy = snap((y - g.ymin()) / g.hy());
  const int ci = std::clamp(static_cast<int>(std::floor(fx)), 0, g.cells_x() - 1);
  const int cj = std::clamp(static_cast<int>(std::floor(fy)), 0, g.cells_y() - 1);
  const double tx = fx - ci;
  const double ty = fy - cj;

  const double v00 = samples_[g.node_index(ci, cj)];
  const double v10 = samples_[g.node_index(ci + 1, cj)];
  const double v01 = samples_[g.node_index(ci, cj + 1)];
  const double v11 = samples_[g.node_index(ci + 1, cj + 1)];

  const double bottom = (1.0 - tx) * v00 + tx * v10;
  const double top = (1.0 - tx) * v01 + tx * v11;
  const bool inside_x = p.x() >= g.xmin() && p.x() <= g.xmax();
  const bool inside_y = p.y() >= g.ymin() && p.y() <= g.ymax();
  gradient.x() = inside_x ? ((1.0 - ty) * (v10 - v00) + ty * (v11 - v01)) / g.hx() : 0.0;
  gradient.y() = inside_y ? (top - bottom) / g.hy() : 0.0;
  return (1.0 - ty) * bottom + ty * top;
}

double blob_value(const std::vector<GaussianBlob>& blobs, const Point& p) {
  double v = 0.0;
  for (const auto& b : blobs) {
    v += b.amplitude * std::exp(-(p - b.center).squaredNorm() / (2.0 * b.sigma * b.sigma));
  }
  return v;
}

ScalarImage render_blobs(const Grid& grid, const std::vector<GaussianBlob>& blobs) {
  return ScalarImage::from_function(grid, [&](const Point& p) { return blob_value(blobs, p); });
}

std::vector<GaussianBlob> random_blobs(int count, std::uint64_t seed, const Disk& region) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<GaussianBlob> blobs;
  blobs.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double r = 0.6 * region.radius * std::sqrt(unit(rng));
    const double phi = 2.0 * M_PI * unit(rng);
    GaussianBlob b;
    b.center = region.center + r * Point(std::cos(phi), std::sin(phi));
    b.amplitude = 0.5 + 0.5 * unit(rng);
    b.sigma = (0.15 + 0.15 * unit(rng)) * region.radius;
    blobs.push_back(b);
  }
  return blobs;
}

}  // namespace polyreg
