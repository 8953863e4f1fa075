#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "holocorr/correspondence.hpp"
#include "holocorr/error.hpp"
#include "holocorr/orbits.hpp"
#include "holocorr/parallel.hpp"
#include "holocorr/poincare.hpp"

namespace holocorr {

/// Finite atomic measure on the sphere, atoms grouped by orbit level.
struct AtomicMeasure {
  std::vector<SpherePoint> points;
  std::vector<double> masses;
  std::vector<std::size_t> level_offsets;  ///< level n atoms: [level_offsets[n], level_offsets[n+1])
  double s = 0.0;
  int depth = 0;
  SpherePoint basepoint;

  std::size_t size() const { return points.size(); }
  double total_mass(unsigned threads = 1) const {
    return deterministic_sum(masses.size(), threads, [&](std::size_t i) { return masses[i]; });
  }
  double level_mass(int n, unsigned threads = 1) const {
    const std::size_t b = level_offsets[static_cast<std::size_t>(n)], e = level_offsets[static_cast<std::size_t>(n) + 1];
    return deterministic_sum(e - b, threads, [&](std::size_t i) { return masses[b + i]; });
  }
};

struct MeasureOptions {
  std::size_t node_budget = 20'000'000;
  unsigned threads = 1;
};

/// Normalized partial Poincare series measure: one atom per branch of F^n at
/// x (n <= depth) with mass |Df|^s / P_s.
inline AtomicMeasure patterson_sullivan(const Correspondence& c, const SpherePoint& x, double s, int depth, const MeasureOptions& opt = {}) {
  if (!(s > 0.0)) throw Error(ErrorCode::invalid_argument, "patterson_sullivan: s must be positive");
  ExpandOptions eo;
  eo.node_budget = opt.node_budget;
  eo.threads = opt.threads;
  FlatTree t = expand_flat(c, x, depth, eo);
  AtomicMeasure m;
  m.s = s;
  m.depth = depth;
  m.basepoint = x;
  m.level_offsets = t.offsets;
  m.points = std::move(t.points);
  m.masses = std::move(t.log_weights);
  double top = -std::numeric_limits<double>::infinity();
  for (double lw : m.masses) {
    if (lw == std::numeric_limits<double>::infinity())
      throw Error(ErrorCode::infinite_weight, "patterson_sullivan: infinite branch derivative along the orbit");
    top = std::max(top, s * lw);
  }
  if (top == -std::numeric_limits<double>::infinity()) throw Error(ErrorCode::infinite_weight, "patterson_sullivan: zero total weight");
  const double total = deterministic_sum(m.masses.size(), opt.threads, [&](std::size_t i) { return std::exp(s * m.masses[i] - top); });
  if (!(total > 0.0)) throw Error(ErrorCode::infinite_weight, "patterson_sullivan: zero total weight");
  const double log_total = top + std::log(total);
  parallel_for(m.masses.size(), opt.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) m.masses[i] = std::exp(s * m.masses[i] - log_total);
  });
  return m;
}

/// Closed chordal disk.
struct ChordalDisk {
  SpherePoint center;
  double radius = 0.0;
  bool contains(const SpherePoint& p) const { return chordal_distance(p, center) <= radius; }
};

/// Points of the chordal circle of the given radius about center.
inline std::vector<SpherePoint> chordal_circle(const SpherePoint& center, double radius, int samples) {
  const auto c = embed(center);
  // Orthonormal frame (c, u, v).
  std::array<double, 3> a = std::abs(c[2]) < 0.9 ? std::array<double, 3>{0, 0, 1} : std::array<double, 3>{1, 0, 0};
  const double dot = a[0] * c[0] + a[1] * c[1] + a[2] * c[2];
  std::array<double, 3> u{a[0] - dot * c[0], a[1] - dot * c[1], a[2] - dot * c[2]};
  const double nu = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  for (auto& v : u) v /= nu;
  const std::array<double, 3> v{c[1] * u[2] - c[2] * u[1], c[2] * u[0] - c[0] * u[2], c[0] * u[1] - c[1] * u[0]};
  // Chordal radius r corresponds to angular radius 2 asin(r/2).
  const double ang = 2.0 * std::asin(std::min(1.0, radius / 2.0));
  std::vector<SpherePoint> out;
  for (int k = 0; k < samples; ++k) {
    const double th = 2.0 * std::numbers::pi * k / samples;
    std::array<double, 3> p;
    for (std::size_t i = 0; i < 3; ++i) p[i] = std::cos(ang) * c[i] + std::sin(ang) * (std::cos(th) * u[i] + std::sin(th) * v[i]);
    // Inverse stereographic projection from the north pole (0,0,1).
    if (p[2] > 0.0) {
      out.push_back(SpherePoint::from_inverted(cplx(p[0], -p[1]) / (1.0 + p[2])));
    } else {
      out.push_back(SpherePoint::finite(cplx(p[0], p[1]) / (1.0 - p[2])));
    }
  }
  return out;
}

struct ConformalityReport {
  ChordalDisk region;
  int branch = 0;            ///< index into the sorted forward images of the region centre
  SpherePoint image_center;  ///< f(centre)
  double image_radius = 0.0; ///< chordal radius of a ball containing f(region)
  double delta = 0.0;
  double lhs = 0.0;          ///< mass of atoms in f(region) reached by the branch
  double rhs = 0.0;          ///< sum over atoms a in region of mass(a) |Df(a)|^delta
  double rel_residual = 0.0;
  std::size_t atoms_in_region = 0;
  std::size_t atoms_in_image = 0;
  std::string approximation = "special-pair condition approximated: atoms of f(A) must have a preimage atom in A";
};

namespace detail {

/// Branch through the region: the image nearest the centre's image.
inline SpherePoint branch_image(const Correspondence& c, const SpherePoint& z, const SpherePoint& w0) {
  const auto ws = c.forward(z);
  std::size_t best = 0;
  for (std::size_t k = 1; k < ws.size(); ++k)
    if (chordal_distance(ws[k], w0) < chordal_distance(ws[best], w0)) best = k;
  return ws[best];
}

inline double relative_residual(double lhs, double rhs) {
  return std::abs(lhs - rhs) / std::max({lhs, rhs, 1e-300});
}

}  // namespace detail

/// Points z with a branch critical at z (P_z = 0 on the curve), with images.
inline std::vector<BranchGerm> branch_critical_points(const Correspondence& c) {
  const auto res = resultant_w(c.poly(), c.poly().partial_z());
  std::vector<SpherePoint> cands;
  if (!res.identically_zero && res.poly.degree() >= 1)
    for (auto r : roots(res.poly, 1e-8)) cands.push_back(c.anti() ? SpherePoint(std::conj(r)) : SpherePoint(r));
  cands.push_back(SpherePoint::infinity());
  std::vector<BranchGerm> out;
  for (const auto& z : cands)
    for (const auto& g : c.germs(z))
      if (g.deriv_sph <= 1e-6) out.push_back(g);
  return out;
}

/// Validates a branch over the disk and returns (f(centre), image radius).
inline std::pair<SpherePoint, double> validate_branch(const Correspondence& c, const ChordalDisk& disk, int branch) {
  if (!(disk.radius > 0.0 && disk.radius < 2.0)) throw Error(ErrorCode::invalid_argument, "conformality: chordal radius must lie in (0, 2)");
  const auto ws = c.forward(disk.center);
  if (branch < 0 || static_cast<std::size_t>(branch) >= ws.size()) throw Error(ErrorCode::invalid_argument, "conformality: branch index out of range");
  const SpherePoint w0 = ws[static_cast<std::size_t>(branch)];
  for (const auto& v : c.critical_values_backward())
    if (disk.contains(v)) throw Error(ErrorCode::no_valid_branch, "conformality: region contains a critical value of the inverse");
  auto samples = chordal_circle(disk.center, disk.radius, 64);
  auto inner = chordal_circle(disk.center, 0.5 * disk.radius, 32);
  samples.insert(samples.end(), inner.begin(), inner.end());
  samples.push_back(disk.center);
  double reach = 0.0, sep = std::numeric_limits<double>::infinity();
  for (const auto& z : samples) {
    const auto imgs = c.forward(z);
    std::size_t best = 0;
    for (std::size_t k = 1; k < imgs.size(); ++k)
      if (chordal_distance(imgs[k], w0) < chordal_distance(imgs[best], w0)) best = k;
    reach = std::max(reach, chordal_distance(imgs[best], w0));
    for (std::size_t k = 0; k < imgs.size(); ++k)
      if (k != best) sep = std::min(sep, chordal_distance(imgs[k], imgs[best]));
  }
  if (!(reach < sep / 3.0))
    throw Error(ErrorCode::no_valid_branch, "conformality: branch images over the region are not separated from the other sheets", {reach, sep});
  for (const auto& g : branch_critical_points(c))
    if (disk.contains(g.z) && chordal_distance(g.w, w0) <= 2.0 * reach)
      throw Error(ErrorCode::no_valid_branch, "conformality: the branch has a critical point in the region");
  return {w0, reach};
}

/// Conformality residuals for one region and branch, for several exponents.
inline std::vector<ConformalityReport> conformality_residuals(const AtomicMeasure& m, const Correspondence& c, const ChordalDisk& disk, int branch,
                                                              std::span<const double> deltas, unsigned threads = 1) {
  const auto [w0, reach] = validate_branch(c, disk, branch);
  const double image_radius = 1.05 * reach + 1e-12;
  const std::size_t n = m.size();
  std::vector<ConformalityReport> out;
  // Atoms of f(A): within the image ball and with a preimage in A on this branch.
  auto in_image = [&](std::size_t i) {
    const auto& b = m.points[i];
    if (chordal_distance(b, w0) > image_radius) return false;
    for (const auto& a : c.backward(b)) {
      if (!disk.contains(a)) continue;
      if (chordal_distance(detail::branch_image(c, a, w0), b) <= 1e-7) return true;
    }
    return false;
  };
  std::vector<std::uint8_t> image_flag(n, 0);
  std::vector<double> deriv;  // |Df| at atoms of A, compacted
  std::vector<std::size_t> region_idx;
  for (std::size_t i = 0; i < n; ++i)
    if (disk.contains(m.points[i])) region_idx.push_back(i);
  deriv.resize(region_idx.size());
  parallel_for(region_idx.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const auto& a = m.points[region_idx[k]];
      deriv[k] = c.branch_derivative(a, detail::branch_image(c, a, w0));
    }
  });
  parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) image_flag[i] = in_image(i) ? 1 : 0;
  });
  std::size_t image_count = 0;
  for (auto f : image_flag) image_count += f;
  const double lhs = deterministic_sum(n, threads, [&](std::size_t i) { return image_flag[i] ? m.masses[i] : 0.0; });
  for (double delta : deltas) {
    ConformalityReport r;
    r.region = disk;
    r.branch = branch;
    r.image_center = w0;
    r.image_radius = image_radius;
    r.delta = delta;
    r.lhs = lhs;
    r.rhs = deterministic_sum(region_idx.size(), threads,
                              [&](std::size_t k) { return m.masses[region_idx[k]] * std::pow(deriv[k], delta); });
    r.rel_residual = detail::relative_residual(r.lhs, r.rhs);
    r.atoms_in_region = region_idx.size();
    r.atoms_in_image = image_count;
    out.push_back(r);
  }
  return out;
}

inline ConformalityReport conformality_residual(const AtomicMeasure& m, const Correspondence& c, const ChordalDisk& disk, double delta,
                                                int branch = 0, unsigned threads = 1) {
  const double d[1] = {delta};
  return conformality_residuals(m, c, disk, branch, d, threads).front();
}

/// Total mass of atoms within chordal distance radius of omega.
inline double parabolic_mass(const AtomicMeasure& m, const SpherePoint& omega, double radius, unsigned threads = 1) {
  return deterministic_sum(m.size(), threads, [&](std::size_t i) {
    const double d = chordal_distance(m.points[i], omega);
    return (radius == 0.0 ? d == 0.0 : d <= radius) ? m.masses[i] : 0.0;
  });
}

struct ParabolicOrderResult {
  int p = 0;
  double slope = 0.0;     ///< fitted d log|z_n - omega| / d log n
  double r2 = 0.0;
  double seed_angle = 0.0;
  double fit_constant = 0.0;  ///< exp(intercept): empirical scale of |z_n - omega| n^{1/p}
  cplx multiplier;
};

namespace detail {

/// The germ at omega that fixes omega.
inline BranchGerm fixing_germ(const Correspondence& c, const SpherePoint& omega) {
  const auto gs = c.germs(omega);
  std::size_t best = 0;
  for (std::size_t k = 1; k < gs.size(); ++k)
    if (chordal_distance(gs[k].w, omega) < chordal_distance(gs[best].w, omega)) best = k;
  if (gs.empty() || chordal_distance(gs[best].w, omega) > 1e-8)
    throw Error(ErrorCode::not_fixed, "the point is not fixed by any branch");
  return gs[best];
}

inline SpherePoint chart_offset(const SpherePoint& omega, cplx delta) {
  const auto ch = omega.unit_chart();
  return ch.inverted ? SpherePoint::from_inverted(ch.coord + delta) : SpherePoint::finite(ch.coord + delta);
}

}  // namespace detail

/// Petal order p at an indifferent fixed point: iterate the fixing branch
/// from seeds around omega and fit log|z_n - omega| against log n.
inline ParabolicOrderResult parabolic_order(const Correspondence& c, const SpherePoint& omega, int n_max = 4000, double seed_radius = 0.05,
                                            int directions = 16) {
  if (n_max < 16) throw Error(ErrorCode::invalid_argument, "parabolic_order: n_max must be at least 16");
  const auto germ = detail::fixing_germ(c, omega);
  if (!std::isfinite(germ.deriv_sph) || std::abs(germ.deriv_sph - 1.0) > kIndifferentBand)
    throw Error(ErrorCode::not_indifferent, "parabolic_order: the fixing branch is not indifferent", {germ.deriv_sph});
  ParabolicOrderResult best;
  bool found = false;
  for (int k = 0; k < directions; ++k) {
    const double th = 2.0 * std::numbers::pi * k / directions;
    SpherePoint z = detail::chart_offset(omega, std::polar(seed_radius, th));
    const double d0 = chordal_distance(z, omega);
    std::vector<double> xs, ys;
    bool ok = true;
    for (int n = 1; n <= n_max; ++n) {
      z = detail::branch_image(c, z, z);
      const double d = chordal_distance(z, omega);
      if (!(d < 2.0 * d0) || d == 0.0) {
        ok = false;
        break;
      }
      if (n >= n_max / 2) {
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(d));
      }
    }
    if (!ok) continue;
    const double cnt = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= cnt;
    my /= cnt;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    if (!(slope < -1e-3)) continue;  // not converging along a petal
    const double r2 = syy > 0 ? slope * sxy / syy : 0.0;
    if (!found || r2 > best.r2) {
      best.slope = slope;
      best.r2 = r2;
      best.seed_angle = th;
      best.p = std::max(1, static_cast<int>(std::lround(-1.0 / slope)));
      best.fit_constant = std::exp(my - slope * mx);
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::wrong_direction, "parabolic_order: no seed direction converges to the fixed point");
  best.multiplier = c.chart_derivative(omega, germ.w);
  return best;
}

struct DiracBranch {
  SpherePoint image;
  double derivative = 0.0;
  bool fixes = false;
};

struct DiracReport {
  SpherePoint omega;
  double delta = 0.0;
  std::vector<DiracBranch> branches;
  bool critical_branch_found = false;  ///< some non-fixing branch at omega has derivative 0
  double fixing_pair_lhs = 0.0;        ///< disk around omega with the fixing branch
  double fixing_pair_rhs = 0.0;
  std::vector<ConformalityReport> avoiding_pairs;  ///< sampled pairs avoiding omega on both sides
  int attempts = 0;
  std::uint64_t seed = 0;
};

/// Conformality of the Dirac mass at a fixed point omega.
inline DiracReport dirac_conformality_check(const Correspondence& c, const SpherePoint& omega, double delta, int trials, std::uint64_t seed = 1) {
  DiracReport rep;
  rep.omega = omega;
  rep.delta = delta;
  rep.seed = seed;
  const auto fixing = detail::fixing_germ(c, omega);
  for (const auto& g : c.germs(omega)) {
    const bool fixes = chordal_distance(g.w, omega) <= 1e-8;
    rep.branches.push_back({g.w, g.deriv_sph, fixes});
    if (!fixes && g.deriv_sph <= 1e-6) rep.critical_branch_found = true;
  }
  AtomicMeasure dirac;
  dirac.points = {omega};
  dirac.masses = {1.0};
  dirac.level_offsets = {0, 1};
  dirac.s = delta;
  dirac.basepoint = omega;
  rep.fixing_pair_lhs = 1.0;
  rep.fixing_pair_rhs = std::pow(fixing.deriv_sph, delta);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<int>(rep.avoiding_pairs.size()) < trials && rep.attempts < 50 * std::max(trials, 1)) {
    ++rep.attempts;
    // Uniform point on the sphere, then a small chordal radius.
    const double zc = 2.0 * unit(rng) - 1.0, ph = 2.0 * std::numbers::pi * unit(rng);
    const double rr = std::sqrt(std::max(0.0, 1.0 - zc * zc));
    const std::array<double, 3> p{rr * std::cos(ph), rr * std::sin(ph), zc};
    const SpherePoint center = p[2] > 0.0 ? SpherePoint::from_inverted(cplx(p[0], -p[1]) / (1.0 + p[2])) : SpherePoint::finite(cplx(p[0], p[1]) / (1.0 - p[2]));
    const double radius = 0.02 + 0.1 * unit(rng);
    const ChordalDisk disk{center, radius};
    if (chordal_distance(center, omega) <= 1.5 * radius) continue;
    const int branch = static_cast<int>(unit(rng) * c.dw()) % c.dw();
    try {
      const auto [w0, reach] = validate_branch(c, disk, branch);
      if (chordal_distance(w0, omega) <= 1.5 * reach + 1e-9) continue;
      rep.avoiding_pairs.push_back(conformality_residual(dirac, c, disk, delta, branch));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::no_valid_branch) throw;
    }
  }
  return rep;
}

}  // namespace holocorr
