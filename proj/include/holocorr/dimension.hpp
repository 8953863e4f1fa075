#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "holocorr/cloud.hpp"
#include "holocorr/correspondence.hpp"
#include "holocorr/error.hpp"
#include "holocorr/orbits.hpp"
#include "holocorr/parallel.hpp"
#include "holocorr/poincare.hpp"

namespace holocorr {

struct DimensionEstimate {
  double dim = 0.0;
  std::vector<double> scales;        ///< strictly decreasing box sizes (chordal)
  std::vector<std::size_t> counts;   ///< occupied boxes per scale
  double r2 = 0.0;
  bool degenerate = false;           ///< all counts equal; dim reported as 0
};

namespace detail {

inline std::size_t occupied_boxes(const std::vector<std::array<double, 3>>& xs, double eps) {
  std::vector<std::uint64_t> keys;
  keys.reserve(xs.size());
  constexpr std::uint64_t mask = (1ull << 21) - 1;
  for (const auto& x : xs) {
    std::uint64_t k = 0;
    for (int a = 0; a < 3; ++a) k = (k << 21) | (static_cast<std::uint64_t>(std::floor((x[static_cast<std::size_t>(a)] + 1.0) / eps)) & mask);
    keys.push_back(k);
  }
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

}  // namespace detail

/// Box-counting dimension of a cloud: cubes of side eps in the R^3 embedding
/// of the sphere, anchored at (-1,-1,-1), for n_scales geometric scales from
/// scale_hi down to scale_lo.
inline DimensionEstimate box_dimension(const PointCloud& cloud, double scale_lo, double scale_hi, int n_scales, unsigned threads = 1) {
  if (!(scale_lo > 0.0 && scale_hi > scale_lo)) throw Error(ErrorCode::invalid_argument, "box_dimension: need 0 < scale_lo < scale_hi");
  if (n_scales < 2) throw Error(ErrorCode::invalid_argument, "box_dimension: need at least 2 scales");
  if (scale_lo < 2.0 * cloud.grid_res)
    throw Error(ErrorCode::invalid_argument, "box_dimension: scale_lo must be at least twice the cloud resolution", {scale_lo, cloud.grid_res});
  if (cloud.empty()) throw Error(ErrorCode::insufficient_points, "box_dimension: empty cloud");
  std::vector<std::array<double, 3>> xs;
  xs.reserve(cloud.size());
  for (const auto& p : cloud.points) xs.push_back(embed(p));
  DimensionEstimate est;
  for (int k = 0; k < n_scales; ++k)
    est.scales.push_back(scale_hi * std::pow(scale_lo / scale_hi, static_cast<double>(k) / (n_scales - 1)));
  est.counts.assign(est.scales.size(), 0);
  parallel_for(est.scales.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) est.counts[k] = detail::occupied_boxes(xs, est.scales[k]);
  });
  if (std::all_of(est.counts.begin(), est.counts.end(), [&](std::size_t v) { return v == est.counts.front(); })) {
    est.degenerate = true;
    return est;
  }
  if (cloud.size() < 100)
    throw Error(ErrorCode::insufficient_points, "box_dimension: at least 100 points required", {static_cast<double>(cloud.size())});
  const double n = static_cast<double>(est.scales.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < est.scales.size(); ++k) {
    mx += -std::log(est.scales[k]);
    my += std::log(static_cast<double>(est.counts[k]));
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < est.scales.size(); ++k) {
    const double dx = -std::log(est.scales[k]) - mx, dy = std::log(static_cast<double>(est.counts[k])) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  est.r2 = syy > 0.0 ? std::clamp(slope * sxy / syy, 0.0, 1.0) : 0.0;
  est.dim = std::clamp(slope, 0.0, 2.0);
  return est;
}

struct ReportConfig {
  int depth = 20;          ///< limit-set depth
  int burn_in = -1;        ///< -1: depth / 3
  double grid_res = 1e-3;
  int delta_depth = -1;    ///< -1: same as depth
  double s_lo = 0.5;
  double s_hi = 2.0;
  double tol = 1e-4;
  double tail_fraction = 0.5;
  double scale_lo = -1.0;  ///< -1: 4 * grid_res
  double scale_hi = 0.1;
  int n_scales = 8;
  double slack = 0.1;
  unsigned threads = 1;
};

struct HdDeltaReport {
  DimensionEstimate hd;
  DeltaEstimate delta;
  std::size_t cloud_size = 0;
  double slack = 0.1;
  bool inequality_ok = false;
  bool delta_lt_2 = false;
  std::string note = "hd_est is a box-counting dimension used as a proxy for Hausdorff dimension";
};

/// Limit-set box dimension against the critical exponent at x. The cloud is
/// copied to cloud_out when given.
inline HdDeltaReport hd_delta_report(const Correspondence& c, const SpherePoint& x, const ReportConfig& cfg, PointCloud* cloud_out = nullptr) {
  const int burn_in = cfg.burn_in < 0 ? cfg.depth / 3 : cfg.burn_in;
  auto cloud = limit_set(c, x, cfg.depth, burn_in, cfg.grid_res, cfg.threads);
  HdDeltaReport rep;
  rep.slack = cfg.slack;
  rep.cloud_size = cloud.size();
  rep.hd = box_dimension(cloud, cfg.scale_lo < 0 ? 4.0 * cfg.grid_res : cfg.scale_lo, cfg.scale_hi, cfg.n_scales, cfg.threads);
  DeltaOptions opt;
  opt.tail_fraction = cfg.tail_fraction;
  opt.poincare.threads = cfg.threads;
  rep.delta = critical_exponent(c, x, cfg.s_lo, cfg.s_hi, cfg.tol, cfg.delta_depth < 0 ? cfg.depth : cfg.delta_depth, opt);
  rep.inequality_ok = rep.hd.dim <= rep.delta.delta + cfg.slack;
  rep.delta_lt_2 = rep.delta.delta < 2.0;
  if (cloud_out) *cloud_out = std::move(cloud);
  return rep;
}

}  // namespace holocorr
