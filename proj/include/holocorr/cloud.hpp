#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "holocorr/sphere.hpp"

namespace holocorr {

/// Total order on sphere points: finite points by (re, im), infinity last.
inline bool sphere_less(const SpherePoint& a, const SpherePoint& b) {
  if (a.is_infinity() || b.is_infinity()) return !a.is_infinity() && b.is_infinity();
  const cplx x = a.value(), y = b.value();
  if (x.real() != y.real()) return x.real() < y.real();
  return x.imag() < y.imag();
}

/// Spherically deduplicated sample of a limit set.
struct PointCloud {
  std::vector<SpherePoint> points;
  double grid_res = 0.0;  ///< chordal dedup resolution; pairwise distances >= grid_res/2

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Uniform hash grid over the sphere embedded in R^3 (chordal metric).
class SphereGrid {
 public:
  explicit SphereGrid(double cell) : cell_(cell) {}

  double cell() const { return cell_; }

  void insert(const SpherePoint& p, std::uint32_t index) {
    const auto x = embed(p);
    cells_[key(cell_of(x))].push_back(index);
    pos_.resize(std::max<std::size_t>(pos_.size(), index + 1));
    pos_[index] = x;
  }

  /// Index of the stored point nearest to p among those within radius
  /// (radius must not exceed the cell size).
  std::optional<std::uint32_t> nearest_within(const SpherePoint& p, double radius) const {
    const auto x = embed(p);
    const auto c = cell_of(x);
    std::optional<std::uint32_t> best;
    double best_d = radius;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = cells_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
          if (it == cells_.end()) continue;
          for (auto idx : it->second) {
            const auto& y = pos_[idx];
            const double d = std::sqrt((x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1]) + (x[2] - y[2]) * (x[2] - y[2]));
            if (d <= best_d && (!best || d < best_d || idx < *best)) {
              best_d = d;
              best = idx;
            }
          }
        }
    return best;
  }

 private:
  std::array<std::int64_t, 3> cell_of(const std::array<double, 3>& x) const {
    return {static_cast<std::int64_t>(std::floor((x[0] + 1.0) / cell_)),
            static_cast<std::int64_t>(std::floor((x[1] + 1.0) / cell_)),
            static_cast<std::int64_t>(std::floor((x[2] + 1.0) / cell_))};
  }
  static std::uint64_t key(const std::array<std::int64_t, 3>& c) {
    constexpr std::uint64_t mask = (1ull << 21) - 1;
    return ((static_cast<std::uint64_t>(c[0] + 4) & mask) << 42) | ((static_cast<std::uint64_t>(c[1] + 4) & mask) << 21) |
           (static_cast<std::uint64_t>(c[2] + 4) & mask);
  }

  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
  std::vector<std::array<double, 3>> pos_;
};

/// Greedy dedup in input order: a point is kept unless a kept point lies
/// within grid_res/2.
inline PointCloud dedup_points(std::span<const SpherePoint> pts, double grid_res) {
  PointCloud cloud;
  cloud.grid_res = grid_res;
  SphereGrid grid(grid_res);
  for (const auto& p : pts) {
    if (grid.nearest_within(p, 0.5 * grid_res)) continue;
    grid.insert(p, static_cast<std::uint32_t>(cloud.points.size()));
    cloud.points.push_back(p);
  }
  return cloud;
}

}  // namespace holocorr
