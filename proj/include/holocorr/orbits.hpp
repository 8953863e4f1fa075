#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "holocorr/cloud.hpp"
#include "holocorr/correspondence.hpp"
#include "holocorr/error.hpp"
#include "holocorr/parallel.hpp"

namespace holocorr {

enum class ExpandMode { exact, dedup };

struct ExpandOptions {
  double grid_res = 1e-3;                  ///< dedup merge resolution (dedup mode only)
  std::size_t node_budget = 20'000'000;    ///< per-level node cap in exact mode
  unsigned threads = 1;
};

struct OrbitNode {
  SpherePoint point;
  double log_weight = 0.0;  ///< log of the product of branch derivatives along the path
  std::uint32_t parent = 0;
};

struct LevelNodes {
  int depth = 0;
  std::vector<OrbitNode> nodes;
  bool summable = true;  ///< false once dedup merging has happened
};

/// Exact orbit tree stored level by level in flat arrays (no parent links).
/// Level n occupies [offsets[n], offsets[n+1]).
struct FlatTree {
  std::vector<SpherePoint> points;
  std::vector<double> log_weights;
  std::vector<std::size_t> offsets;

  int depth() const { return static_cast<int>(offsets.size()) - 2; }
  std::size_t level_size(int n) const { return offsets[static_cast<std::size_t>(n) + 1] - offsets[static_cast<std::size_t>(n)]; }
};

namespace detail {

inline double child_log_weight(double parent, double deriv) {
  if (parent == -std::numeric_limits<double>::infinity()) return parent;
  return parent + std::log(deriv);
}

inline void check_budget(std::size_t next, std::size_t budget, int level) {
  if (next > budget)
    throw Error(ErrorCode::budget_exceeded,
                "expand: level " + std::to_string(level) + " needs " + std::to_string(next) + " nodes (budget " + std::to_string(budget) +
                    "); use dedup mode or a smaller depth",
                {static_cast<double>(next), static_cast<double>(budget)});
}

}  // namespace detail

/// Exact-mode expansion into flat storage: every branch of F^n at x, n <= depth.
/// Children of the k-th node of a level are stored contiguously in root order,
/// so the layout does not depend on the thread count.
inline FlatTree expand_flat(const Correspondence& c, const SpherePoint& x, int depth, const ExpandOptions& opt = {}) {
  if (depth < 0) throw Error(ErrorCode::invalid_argument, "expand: depth must be >= 0");
  const auto dw = static_cast<std::size_t>(c.dw());
  std::size_t total = 0, level = 1;
  for (int n = 0; n <= depth; ++n) {
    detail::check_budget(level, opt.node_budget, n);
    total += level;
    level *= dw;
  }
  FlatTree t;
  t.points.resize(total);
  t.log_weights.resize(total);
  t.offsets.assign(1, 0);
  t.points[0] = x;
  t.log_weights[0] = 0.0;
  t.offsets.push_back(1);
  for (int n = 0; n < depth; ++n) {
    const std::size_t begin = t.offsets[static_cast<std::size_t>(n)];
    const std::size_t end = t.offsets[static_cast<std::size_t>(n) + 1];
    const std::size_t out = end;
    parallel_for(end - begin, opt.threads, [&](std::size_t i0, std::size_t i1) {
      for (std::size_t i = i0; i < i1; ++i) {
        const auto germs = c.germs(t.points[begin + i]);
        for (std::size_t k = 0; k < dw; ++k) {
          const std::size_t slot = out + i * dw + k;
          t.points[slot] = germs[k].w;
          t.log_weights[slot] = detail::child_log_weight(t.log_weights[begin + i], germs[k].deriv_sph);
        }
      }
    });
    t.offsets.push_back(out + (end - begin) * dw);
  }
  return t;
}

/// Orbit tree from x to the given depth. Exact mode enumerates every branch;
/// dedup mode merges nodes closer than grid_res/2 (keeping the larger weight)
/// and marks levels non-summable.
inline std::vector<LevelNodes> expand(const Correspondence& c, const SpherePoint& x, int depth, ExpandMode mode,
                                      const ExpandOptions& opt = {}) {
  if (depth < 0) throw Error(ErrorCode::invalid_argument, "expand: depth must be >= 0");
  const auto dw = static_cast<std::size_t>(c.dw());
  std::vector<LevelNodes> levels;
  levels.push_back({0, {{x, 0.0, 0}}, true});
  for (int n = 0; n < depth; ++n) {
    const auto& cur = levels.back().nodes;
    const std::size_t next_size = cur.size() * dw;
    if (mode == ExpandMode::exact) detail::check_budget(next_size, opt.node_budget, n + 1);
    std::vector<OrbitNode> children(next_size);
    parallel_for(cur.size(), opt.threads, [&](std::size_t i0, std::size_t i1) {
      for (std::size_t i = i0; i < i1; ++i) {
        const auto germs = c.germs(cur[i].point);
        for (std::size_t k = 0; k < dw; ++k)
          children[i * dw + k] = {germs[k].w, detail::child_log_weight(cur[i].log_weight, germs[k].deriv_sph), static_cast<std::uint32_t>(i)};
      }
    });
    LevelNodes next{n + 1, {}, mode == ExpandMode::exact};
    if (mode == ExpandMode::exact) {
      next.nodes = std::move(children);
    } else {
      SphereGrid grid(opt.grid_res);
      for (const auto& node : children) {
        if (auto hit = grid.nearest_within(node.point, 0.5 * opt.grid_res)) {
          auto& kept = next.nodes[*hit];
          kept.log_weight = std::max(kept.log_weight, node.log_weight);
          continue;
        }
        grid.insert(node.point, static_cast<std::uint32_t>(next.nodes.size()));
        next.nodes.push_back(node);
      }
      if (next.nodes.size() > opt.node_budget) detail::check_budget(next.nodes.size(), opt.node_budget, n + 1);
    }
    levels.push_back(std::move(next));
  }
  return levels;
}

/// Approximate forward limit set: dedup union of levels burn_in..depth.
inline PointCloud limit_set(const Correspondence& c, const SpherePoint& x, int depth, int burn_in, double grid_res,
                            unsigned threads = 1) {
  if (burn_in < 0 || burn_in >= depth) throw Error(ErrorCode::invalid_argument, "limit_set: need 0 <= burn_in < depth");
  if (!(grid_res > 0.0)) throw Error(ErrorCode::invalid_argument, "limit_set: grid_res must be positive");
  ExpandOptions opt;
  opt.grid_res = grid_res;
  opt.threads = threads;
  const auto levels = expand(c, x, depth, ExpandMode::dedup, opt);
  std::vector<SpherePoint> pts;
  for (int n = burn_in; n <= depth; ++n)
    for (const auto& node : levels[static_cast<std::size_t>(n)].nodes) pts.push_back(node.point);
  return dedup_points(pts, grid_res);
}

struct Window {
  double xmin = -2, xmax = 2, ymin = -2, ymax = 2;
};

/// 8-bit grayscale raster, row-major, top-left origin.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  std::uint8_t at(int col, int row) const { return pixels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)]; }
};

/// Binary hit raster: pixels containing a cloud point are 255, others 0.
inline Raster render(const PointCloud& cloud, const Window& win, int width, int height) {
  if (!(win.xmax > win.xmin) || !(win.ymax > win.ymin) || width <= 0 || height <= 0)
    throw Error(ErrorCode::invalid_argument, "render: degenerate window or resolution");
  Raster r{width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0)};
  for (const auto& p : cloud.points) {
    if (p.is_infinity()) continue;
    const cplx z = p.value();
    const double u = (z.real() - win.xmin) / (win.xmax - win.xmin) * width;
    const double v = (win.ymax - z.imag()) / (win.ymax - win.ymin) * height;
    if (!(u >= 0.0 && u < width && v >= 0.0 && v < height)) continue;
    const int col = std::min(width - 1, static_cast<int>(u));
    const int row = std::min(height - 1, static_cast<int>(v));
    r.pixels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)] = 255;
  }
  return r;
}

/// Binary PGM (P5, maxval 255).
inline void write_pgm(std::ostream& os, const Raster& r) {
  os << "P5\n" << r.width << ' ' << r.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(r.pixels.data()), static_cast<std::streamsize>(r.pixels.size()));
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// `re,im` rows; points at infinity are counted in the leading comment.
inline void write_cloud_csv(std::ostream& os, const PointCloud& cloud) {
  std::size_t at_inf = 0;
  for (const auto& p : cloud.points) at_inf += p.is_infinity() ? 1 : 0;
  os << "# points_at_infinity=" << at_inf << " grid_res=" << format_double(cloud.grid_res) << '\n';
  for (const auto& p : cloud.points) {
    if (p.is_infinity()) continue;
    const cplx z = p.value();
    os << format_double(z.real()) << ',' << format_double(z.imag()) << '\n';
  }
}

}  // namespace holocorr
