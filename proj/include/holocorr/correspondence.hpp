#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "holocorr/cloud.hpp"
#include "holocorr/error.hpp"
#include "holocorr/polyalg.hpp"
#include "holocorr/sphere.hpp"

namespace holocorr {

enum class Kind { holomorphic, antiholomorphic };

/// One local branch at z: image point and spherical derivative magnitude.
struct BranchGerm {
  SpherePoint z;
  SpherePoint w;
  double deriv_sph = 0.0;  ///< 0 at a critical point, +inf where P_w vanishes
  bool critical = false;
};

enum class FixedClass { attracting, repelling, indifferent, singular };

inline std::string_view to_string(FixedClass c) {
  switch (c) {
    case FixedClass::attracting: return "attracting";
    case FixedClass::repelling: return "repelling";
    case FixedClass::indifferent: return "indifferent";
    case FixedClass::singular: return "singular";
  }
  return "unknown";
}

struct FixedPoint {
  SpherePoint point;
  int multiplicity = 1;
  cplx multiplier;            ///< chart derivative dw/dz (dw/d conj z for antiholomorphic)
  double multiplier_abs = 0;  ///< spherical |Df| at the point
  FixedClass cls = FixedClass::attracting;
  std::optional<std::pair<int, int>> rotation;  ///< p/q with multiplier ~ exp(2 pi i p/q)
};

struct InverseLikeReport {
  double fraction_unique = 0.0;
  struct Violation {
    SpherePoint w;
    int preimages_in_cloud = 0;
  };
  std::vector<Violation> violations;
};

/// Indifferent band half-width around |m| = 1.
inline constexpr double kIndifferentBand = 1e-6;

/// Best rational p/q (q <= max_den) for x by continued fractions, when |x - p/q| <= tol.
inline std::optional<std::pair<int, int>> rational_approx(double x, int max_den, double tol) {
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const long h2 = static_cast<long>(a) * h1 + h0;
    const long k2 = static_cast<long>(a) * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) <= tol) return std::pair<int, int>{static_cast<int>(h1), static_cast<int>(k1)};
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

/// Multivalued map F : z -> w defined by P(z, w) = 0, or P(conj z, w) = 0 for
/// the antiholomorphic kind. Immutable; all members are thread-safe.
class Correspondence {
 public:
  Correspondence(BiPoly p, Kind kind, std::string family = "custom", nlohmann::json params = nlohmann::json::object())
      : kind_(kind), family_(std::move(family)), params_(std::move(params)) {
    auto stripped = remove_content(p);
    poly_ = std::move(stripped.poly);
    removed_z_ = std::move(stripped.removed_z);
    removed_w_ = std::move(stripped.removed_w);
    if (poly_.is_zero()) throw Error(ErrorCode::degree_collapse, "correspondence: zero polynomial");
    if (poly_.dz() < 1 || poly_.dw() < 1)
      throw Error(ErrorCode::degree_collapse, "correspondence: need d_z >= 1 and d_w >= 1 (got " + std::to_string(poly_.dz()) + ", " + std::to_string(poly_.dw()) + ")");
    build_charts();
    check_square_free();
  }

  const BiPoly& poly() const { return poly_; }
  Kind kind() const { return kind_; }
  bool anti() const { return kind_ == Kind::antiholomorphic; }
  int dz() const { return poly_.dz(); }
  int dw() const { return poly_.dw(); }
  const std::string& family() const { return family_; }
  const nlohmann::json& params() const { return params_; }
  const std::vector<cplx>& removed_z() const { return removed_z_; }
  const std::vector<cplx>& removed_w() const { return removed_w_; }

  /// F(z) with multiplicity (exactly d_w points), sorted.
  std::vector<SpherePoint> forward(const SpherePoint& z) const {
    const auto zc = z.unit_chart();
    const cplx a = anti() ? std::conj(zc.coord) : zc.coord;
    auto pts = fiber(chart(zc.inverted, false).slice_w(a), chart(zc.inverted, true).slice_w(a), dw());
    std::sort(pts.begin(), pts.end(), sphere_less);
    return pts;
  }

  /// F^{-1}(w) with multiplicity (exactly d_z points), sorted.
  std::vector<SpherePoint> backward(const SpherePoint& w) const {
    const auto wc = w.unit_chart();
    auto pts = fiber(chart(false, wc.inverted).slice_z(wc.coord), chart(true, wc.inverted).slice_z(wc.coord), dz());
    if (anti())
      for (auto& p : pts) p = p.conj();
    std::sort(pts.begin(), pts.end(), sphere_less);
    return pts;
  }

  /// Spherical |Df| of the branch through (z, w) by implicit differentiation.
  double branch_derivative(const SpherePoint& z, const SpherePoint& w) const {
    return germ_derivative(z, w, true).first;
  }

  /// Branch germs at z: every image with its spherical derivative. Repeated
  /// images (sheets meeting) get +inf.
  std::vector<BranchGerm> germs(const SpherePoint& z) const {
    const auto ws = forward(z);
    std::vector<BranchGerm> out;
    out.reserve(ws.size());
    for (std::size_t k = 0; k < ws.size(); ++k) {
      BranchGerm g{z, ws[k], 0.0, false};
      const bool repeated = (k > 0 && ws[k] == ws[k - 1]) || (k + 1 < ws.size() && ws[k] == ws[k + 1]);
      if (repeated) {
        g.deriv_sph = std::numeric_limits<double>::infinity();
      } else {
        g.deriv_sph = germ_derivative(z, ws[k], false).first;
      }
      g.critical = (g.deriv_sph == 0.0);
      out.push_back(g);
    }
    return out;
  }

  /// Complex chart derivative (dw/dz, or dw/d conj z) of the branch through
  /// (z, w), computed in the unit charts of z and w.
  cplx chart_derivative(const SpherePoint& z, const SpherePoint& w) const {
    const auto zc = z.unit_chart();
    const auto wc = w.unit_chart();
    const cplx a = anti() ? std::conj(zc.coord) : zc.coord;
    const auto& d = charts_[index(zc.inverted, wc.inverted)];
    const cplx p1 = d.pz(a, wc.coord), p2 = d.pw(a, wc.coord);
    return -p1 / p2;
  }

  /// Curve residual |P(z*, w)| relative to the evaluation scale.
  double curve_residual(const SpherePoint& z, const SpherePoint& w) const {
    const auto zc = z.unit_chart();
    const auto wc = w.unit_chart();
    const cplx a = anti() ? std::conj(zc.coord) : zc.coord;
    const auto& q = charts_[index(zc.inverted, wc.inverted)].p;
    return std::abs(q(a, wc.coord)) / std::max(q.eval_scale(a, wc.coord), 1e-300);
  }

  /// Critical values of F (w-variable): fibres F^{-1}(w) with a repeated point.
  std::vector<SpherePoint> critical_values_forward() const {
    const auto res = resultant_z(poly_, poly_.partial_z());
    if (res.identically_zero) throw Error(ErrorCode::degenerate_resultant, "critical values: resultant vanishes identically");
    auto candidates = finite_roots_loose(res.poly);
    candidates.push_back(SpherePoint::infinity());
    std::vector<SpherePoint> out;
    for (const auto& w : candidates)
      if (has_repeat(backward(w))) out.push_back(w);
    return merge_points(out);
  }

  /// Critical values of F^{-1} (z-variable): fibres F(z) with a repeated point.
  std::vector<SpherePoint> critical_values_backward() const {
    const auto res = resultant_w(poly_, poly_.partial_w());
    if (res.identically_zero) throw Error(ErrorCode::degenerate_resultant, "critical values: resultant vanishes identically");
    auto candidates = finite_roots_loose(res.poly);
    if (anti())
      for (auto& p : candidates) p = p.conj();
    candidates.push_back(SpherePoint::infinity());
    std::vector<SpherePoint> out;
    for (const auto& z : candidates)
      if (has_repeat(forward(z))) out.push_back(z);
    return merge_points(out);
  }

  /// Backward critical values together with finite z where the w-leading
  /// coefficient vanishes (a sheet escapes to infinity).
  std::vector<SpherePoint> singular_points() const {
    auto out = critical_values_backward();
    const UniPoly lead = poly_.column(static_cast<std::size_t>(dw()));
    if (lead.degree() >= 1) {
      for (auto r : roots(lead, 1e-8)) {
        SpherePoint z(r);
        out.push_back(anti() ? z.conj() : z);
      }
    }
    return merge_points(out);
  }

  /// Period-1 points with multipliers and classification.
  std::vector<FixedPoint> fixed_points() const {
    std::vector<std::pair<SpherePoint, int>> found;
    if (!anti()) {
      const UniPoly diag = poly_.diagonal();
      if (diag.is_zero()) throw Error(ErrorCode::degenerate_resultant, "fixed points: curve contains the diagonal");
      const auto rs = roots(diag, 1e-8);
      for (std::size_t k = 0; k < rs.size();) {
        std::size_t m = 1;
        while (k + m < rs.size() && rs[k + m] == rs[k]) ++m;
        found.emplace_back(SpherePoint(rs[k]), static_cast<int>(m));
        k += m;
      }
      const int at_inf = dz() + dw() - diag.degree();
      if (at_inf > 0) found.emplace_back(SpherePoint::infinity(), at_inf);
    } else {
      for (const auto& p : anti_fixed_points()) found.emplace_back(p, 1);
    }
    std::vector<FixedPoint> out;
    for (const auto& [pt, mult] : found) out.push_back(classify_fixed(pt, mult));
    return out;
  }

  /// For each cloud point w, counts preimages lying within tol of the cloud.
  InverseLikeReport inverse_like_check(const PointCloud& cloud, double tol) const {
    if (cloud.empty()) throw Error(ErrorCode::invalid_argument, "inverse_like_check: empty cloud");
    SphereGrid grid(tol);
    for (std::size_t i = 0; i < cloud.size(); ++i) grid.insert(cloud.points[i], static_cast<std::uint32_t>(i));
    InverseLikeReport rep;
    std::size_t unique = 0;
    for (const auto& w : cloud.points) {
      int count = 0;
      for (const auto& z : backward(w))
        if (grid.nearest_within(z, tol)) ++count;
      if (count == 1) {
        ++unique;
      } else {
        rep.violations.push_back({w, count});
      }
    }
    rep.fraction_unique = static_cast<double>(unique) / static_cast<double>(cloud.size());
    return rep;
  }

 private:
  struct ChartPolys {
    BiPoly p, pz, pw;
  };
  static std::size_t index(bool zi, bool wi) { return (zi ? 2u : 0u) + (wi ? 1u : 0u); }
  const BiPoly& chart(bool zi, bool wi) const { return charts_[index(zi, wi)].p; }

  void build_charts() {
    for (int zi = 0; zi < 2; ++zi)
      for (int wi = 0; wi < 2; ++wi) {
        BiPoly q = chart_poly(zi != 0, wi != 0);
        charts_[index(zi, wi)] = {q, q.partial_z(), q.partial_w()};
      }
  }

  /// Chart polynomial with the formal degrees of the original grid.
  BiPoly chart_poly(bool zi, bool wi) const {
    const std::size_t rows = static_cast<std::size_t>(dz()) + 1, cols = static_cast<std::size_t>(dw()) + 1;
    std::vector<std::vector<cplx>> g(rows, std::vector<cplx>(cols));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) g[zi ? rows - 1 - i : i][wi ? cols - 1 - j : j] = poly_.at(i, j);
    return BiPoly(g);
  }

  /// Roots of a fibre polynomial given in both target charts; degree drops
  /// become points at infinity so the count is always `formal`.
  static std::vector<SpherePoint> fiber(const UniPoly& direct, const UniPoly& inverted, int formal) {
    std::vector<cplx> c(static_cast<std::size_t>(formal) + 1);
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = direct[j];
    double cmax = 0.0;
    for (auto v : c) cmax = std::max(cmax, std::abs(v));
    if (cmax == 0.0) throw Error(ErrorCode::singular_point, "fibre is the whole sphere");
    int top = formal;
    while (top > 0 && std::abs(c[static_cast<std::size_t>(top)]) <= 1e-200 * cmax) --top;
    c.resize(static_cast<std::size_t>(top) + 1);
    std::vector<SpherePoint> out;
    out.reserve(static_cast<std::size_t>(formal));
    if (top > 0) {
      const UniPoly q(c);
      const UniPoly qd = q.derivative();
      const UniPoly inv_d = inverted.derivative();
      for (cplx r : roots(q, 1e-9)) {
        if (std::abs(r) <= 1.0) {
          out.push_back(SpherePoint::finite(r));
          continue;
        }
        // Polish in the inverted chart, where the root is small.
        cplx om = 1.0 / r;
        double res = std::abs(inverted(om));
        for (int it = 0; it < 3 && res > 0.0; ++it) {
          const cplx d = inv_d(om);
          if (d == cplx(0.0, 0.0)) break;
          const cplx next = om - inverted(om) / d;
          const double nres = std::abs(inverted(next));
          if (!(nres < res)) break;
          om = next;
          res = nres;
        }
        out.push_back(SpherePoint::from_inverted(om));
      }
    }
    for (int k = top; k < formal; ++k) out.push_back(SpherePoint::infinity());
    return out;
  }

  /// (derivative, chart multiplier). Throws on singular points of the curve.
  std::pair<double, cplx> germ_derivative(const SpherePoint& z, const SpherePoint& w, bool check_on_curve) const {
    const auto zc = z.unit_chart();
    const auto wc = w.unit_chart();
    const cplx a = anti() ? std::conj(zc.coord) : zc.coord;
    const auto& d = charts_[index(zc.inverted, wc.inverted)];
    if (check_on_curve) {
      const double res = std::abs(d.p(a, wc.coord)) / std::max(d.p.eval_scale(a, wc.coord), 1e-300);
      if (res > 1e-8) throw Error(ErrorCode::not_on_curve, "branch_derivative: point not on the curve", {res});
    }
    const cplx p1 = d.pz(a, wc.coord), p2 = d.pw(a, wc.coord);
    const double s1 = std::max(d.pz.eval_scale(a, wc.coord), 1e-300);
    const double s2 = std::max(d.pw.eval_scale(a, wc.coord), 1e-300);
    const bool zero1 = d.pz.is_zero() || std::abs(p1) <= 1e-14 * s1;
    const bool zero2 = d.pw.is_zero() || std::abs(p2) <= 1e-14 * s2;
    if (zero1 && zero2) throw Error(ErrorCode::singular_point, "branch_derivative: both partials vanish");
    if (zero1) return {0.0, cplx{}};
    if (zero2) return {std::numeric_limits<double>::infinity(), cplx{std::numeric_limits<double>::infinity(), 0.0}};
    const cplx m = -p1 / p2;
    const double sph = std::abs(m) * (1.0 + std::norm(zc.coord)) / (1.0 + std::norm(wc.coord));
    return {sph, m};
  }

  static std::vector<SpherePoint> finite_roots_loose(const UniPoly& p) {
    std::vector<SpherePoint> out;
    if (p.degree() < 1) return out;
    // Multiple roots come back as tight clusters; their centroid is accurate.
    std::vector<std::pair<cplx, int>> clusters;
    for (auto r : roots(p, 1e-6)) {
      bool joined = false;
      for (auto& [sum, n] : clusters)
        if (std::abs(sum / static_cast<double>(n) - r) <= 1e-4 * std::max(1.0, std::abs(r))) {
          sum += r;
          ++n;
          joined = true;
          break;
        }
      if (!joined) clusters.emplace_back(r, 1);
    }
    for (const auto& [sum, n] : clusters) out.emplace_back(sum / static_cast<double>(n));
    return out;
  }

  static bool has_repeat(const std::vector<SpherePoint>& pts) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        if (chordal_distance(pts[i], pts[j]) <= 1e-4) return true;
    return false;
  }

  static std::vector<SpherePoint> merge_points(std::vector<SpherePoint> pts) {
    std::sort(pts.begin(), pts.end(), sphere_less);
    std::vector<SpherePoint> out;
    for (const auto& p : pts) {
      bool dup = false;
      for (const auto& q : out)
        if (chordal_distance(p, q) <= 1e-7) dup = true;
      if (!dup) out.push_back(p);
    }
    return out;
  }

  FixedPoint classify_fixed(const SpherePoint& pt, int mult) const {
    FixedPoint fp;
    fp.point = pt;
    fp.multiplicity = mult;
    try {
      auto [sph, m] = germ_derivative(pt, pt, false);
      fp.multiplier = m;
      fp.multiplier_abs = sph;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::singular_point) throw;
      fp.cls = FixedClass::singular;
      fp.multiplier_abs = std::numeric_limits<double>::quiet_NaN();
      return fp;
    }
    if (fp.multiplier_abs < 1.0 - kIndifferentBand) {
      fp.cls = FixedClass::attracting;
    } else if (fp.multiplier_abs > 1.0 + kIndifferentBand) {
      fp.cls = FixedClass::repelling;
    } else {
      fp.cls = FixedClass::indifferent;
      double turns = std::arg(fp.multiplier) / (2.0 * std::numbers::pi);
      if (turns < 0) turns += 1.0;
      fp.rotation = rational_approx(turns, 64, 1e-6);
    }
    return fp;
  }

  /// Solutions of P(conj z, z) = 0 by damped real Newton from a seed grid in
  /// both charts.
  std::vector<SpherePoint> anti_fixed_points() const {
    std::vector<SpherePoint> out;
    std::vector<double> resid;
    auto consider = [&](bool inv, cplx seed) {
      const auto& d = charts_[index(inv, inv)];
      auto value = [&](cplx z) { return d.p(std::conj(z), z); };
      cplx z = seed;
      cplx g = value(z);
      for (int it = 0; it < 80; ++it) {
        const double scale = std::max(d.p.eval_scale(std::conj(z), z), 1e-300);
        if (std::abs(g) <= 1e-14 * scale) break;
        const cplx q1 = d.pz(std::conj(z), z), q2 = d.pw(std::conj(z), z);
        // (q2 + q1) x + i (q2 - q1) y = -g
        const cplx cx = q2 + q1, cy = cplx(0, 1) * (q2 - q1);
        const double det = cx.real() * cy.imag() - cy.real() * cx.imag();
        if (det == 0.0) return;
        const double x = (-g.real() * cy.imag() + g.imag() * cy.real()) / det;
        const double y = (-cx.real() * g.imag() + cx.imag() * g.real()) / det;
        cplx step(x, y);
        double lambda = 1.0;
        bool improved = false;
        for (int h = 0; h < 30; ++h) {
          const cplx trial = z + lambda * step;
          const cplx gt = value(trial);
          if (std::abs(gt) < std::abs(g)) {
            z = trial;
            g = gt;
            improved = true;
            break;
          }
          lambda *= 0.5;
        }
        if (!improved) break;
      }
      const double scale = std::max(d.p.eval_scale(std::conj(z), z), 1e-300);
      if (std::abs(g) > 1e-11 * scale || std::abs(z) > 1.0 + 1e-9) return;
      const SpherePoint p = inv ? SpherePoint::from_inverted(z) : SpherePoint::finite(z);
      const double res = std::abs(g) / scale;
      // Newton is only linear at multiple fixed points, so merge loosely.
      for (std::size_t k = 0; k < out.size(); ++k)
        if (chordal_distance(p, out[k]) <= 1e-4) {
          if (res < resid[k]) {
            out[k] = p;
            resid[k] = res;
          }
          return;
        }
      out.push_back(p);
      resid.push_back(res);
    };
    constexpr int kRings = 12, kSpokes = 24;
    for (int inv = 0; inv < 2; ++inv) {
      consider(inv != 0, cplx{});
      for (int r = 1; r <= kRings; ++r)
        for (int s = 0; s < kSpokes; ++s) {
          const double rad = static_cast<double>(r) / kRings;
          const double th = 2.0 * std::numbers::pi * (s + 0.5 * (r % 2)) / kSpokes;
          consider(inv != 0, std::polar(rad, th));
        }
    }
    std::sort(out.begin(), out.end(), sphere_less);
    return out;
  }

  void check_square_free() const {
    // A repeated factor makes every generic fibre carry a repeated root.
    const std::array<cplx, 3> probes{cplx(0.3141, 0.2718), cplx(-0.577, 0.161), cplx(0.05, -0.693)};
    int repeated = 0;
    for (auto z : probes) {
      try {
        if (has_repeat_exact(forward(SpherePoint(z)))) ++repeated;
      } catch (const Error&) {
        ++repeated;
      }
    }
    if (repeated == static_cast<int>(probes.size()))
      throw Error(ErrorCode::not_square_free, "correspondence: polynomial has a repeated factor");
  }

  static bool has_repeat_exact(const std::vector<SpherePoint>& pts) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        if (chordal_distance(pts[i], pts[j]) <= 1e-6) return true;
    return false;
  }

  BiPoly poly_;
  Kind kind_;
  std::string family_;
  nlohmann::json params_;
  std::vector<cplx> removed_z_, removed_w_;
  std::array<ChartPolys, 4> charts_;
};

/// Points of F^{-i}(CV_{F^{-1}}) for i <= depth, deduplicated.
inline PointCloud postcritical_backward(const Correspondence& c, int depth, double grid_res = 1e-9) {
  if (depth < 0) throw Error(ErrorCode::invalid_argument, "postcritical_backward: depth must be >= 0");
  std::vector<SpherePoint> all;
  std::vector<SpherePoint> frontier = c.critical_values_backward();
  all = frontier;
  for (int i = 0; i < depth && !frontier.empty(); ++i) {
    std::vector<SpherePoint> next;
    for (const auto& w : frontier)
      for (const auto& z : c.backward(w)) next.push_back(z);
    frontier = dedup_points(next, grid_res).points;
    all.insert(all.end(), frontier.begin(), frontier.end());
  }
  return dedup_points(all, grid_res);
}

}  // namespace holocorr
