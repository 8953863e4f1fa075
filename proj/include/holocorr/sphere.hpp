#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>

namespace holocorr {

using cplx = std::complex<double>;

/// Points of |z| above this are stored in the 1/z chart.
inline constexpr double kChartSwitch = 1e8;

/// A point of the Riemann sphere.
///
/// Stored either as a finite coordinate z (|z| <= kChartSwitch) or in the
/// inverted chart as zeta = 1/z, with zeta = 0 meaning infinity. The
/// representation is canonical, so equality is coordinate equality.
class SpherePoint {
 public:
  constexpr SpherePoint() = default;
  SpherePoint(cplx z) { *this = finite(z); }  // NOLINT: implicit from complex is intended
  SpherePoint(double x) { *this = finite(cplx(x, 0.0)); }  // NOLINT

  static SpherePoint finite(cplx z) {
    SpherePoint p;
    if (std::abs(z) > kChartSwitch) {
      p.inverted_ = true;
      p.coord_ = 1.0 / z;
    } else {
      p.coord_ = normalize_zero(z);
    }
    return p;
  }

  /// The point 1/zeta; zeta = 0 gives infinity.
  static SpherePoint from_inverted(cplx zeta) {
    SpherePoint p;
    if (zeta == cplx(0.0, 0.0) || std::abs(zeta) < 1.0 / kChartSwitch) {
      p.inverted_ = true;
      p.coord_ = normalize_zero(zeta);
    } else {
      p.coord_ = normalize_zero(1.0 / zeta);
    }
    return p;
  }

  static SpherePoint infinity() { return from_inverted(cplx(0.0, 0.0)); }

  bool is_infinity() const { return inverted_ && coord_ == cplx(0.0, 0.0); }
  bool inverted() const { return inverted_; }
  cplx coord() const { return coord_; }

  /// Finite value; +inf components for the point at infinity.
  cplx value() const {
    if (!inverted_) return coord_;
    if (is_infinity()) {
      constexpr double inf = std::numeric_limits<double>::infinity();
      return {inf, inf};
    }
    return 1.0 / coord_;
  }

  /// 1/z as a finite number (+inf components at z = 0).
  cplx inverse_value() const {
    if (inverted_) return coord_;
    if (coord_ == cplx(0.0, 0.0)) {
      constexpr double inf = std::numeric_limits<double>::infinity();
      return {inf, inf};
    }
    return 1.0 / coord_;
  }

  /// Chart in which the coordinate has modulus <= 1: {inverted?, coordinate}.
  struct UnitChart {
    bool inverted;
    cplx coord;
  };
  UnitChart unit_chart() const {
    const double r = std::abs(coord_);
    if (r <= 1.0) return {inverted_, coord_};
    return {!inverted_, 1.0 / coord_};
  }

  SpherePoint conj() const {
    SpherePoint p = *this;
    p.coord_ = normalize_zero(std::conj(coord_));
    return p;
  }

  friend bool operator==(const SpherePoint& a, const SpherePoint& b) {
    return a.inverted_ == b.inverted_ && a.coord_ == b.coord_;
  }

 private:
  static cplx normalize_zero(cplx z) {
    // -0.0 and +0.0 must compare and hash identically.
    return {z.real() == 0.0 ? 0.0 : z.real(), z.imag() == 0.0 ? 0.0 : z.imag()};
  }

  bool inverted_ = false;
  cplx coord_{0.0, 0.0};
};

/// Image under z -> 1/z with 0 <-> infinity.
inline SpherePoint invert_chart(const SpherePoint& p) {
  if (p.inverted()) return SpherePoint::finite(p.coord());
  return SpherePoint::from_inverted(p.coord());
}

/// Chordal distance 2|p-q| / (sqrt(1+|p|^2) sqrt(1+|q|^2)), continuous at infinity.
inline double chordal_distance(const SpherePoint& p, const SpherePoint& q) {
  const auto a = p.unit_chart();
  const auto b = q.unit_chart();
  const double na = std::sqrt(1.0 + std::norm(a.coord));
  const double nb = std::sqrt(1.0 + std::norm(b.coord));
  if (a.inverted == b.inverted) return 2.0 * std::abs(a.coord - b.coord) / (na * nb);
  return 2.0 * std::abs(a.coord * b.coord - 1.0) / (na * nb);
}

/// Position on the unit sphere in R^3 (stereographic); Euclidean distance
/// between embeddings equals the chordal distance.
inline std::array<double, 3> embed(const SpherePoint& p) {
  const auto c = p.unit_chart();
  const double n2 = std::norm(c.coord);
  const double d = 1.0 + n2;
  if (!c.inverted) {
    return {2.0 * c.coord.real() / d, 2.0 * c.coord.imag() / d, (n2 - 1.0) / d};
  }
  // z = 1/zeta: 2z/(1+|z|^2) = 2 conj(zeta)/(1+|zeta|^2)
  return {2.0 * c.coord.real() / d, -2.0 * c.coord.imag() / d, (1.0 - n2) / d};
}

/// (1+|z|^2) expressed as (numerator, log-safe) pieces: returns log(1+|z|^2).
inline double log_chart_factor(const SpherePoint& p) {
  if (!p.inverted()) return std::log1p(std::norm(p.coord()));
  // 1+|z|^2 = (1+|zeta|^2)/|zeta|^2
  return std::log1p(std::norm(p.coord())) - std::log(std::norm(p.coord()));
}

/// Spherical derivative from the Euclidean one: d * (1+|z|^2)/(1+|w|^2).
inline double spherical_scale(const SpherePoint& z, const SpherePoint& w, double euclid_deriv) {
  if (euclid_deriv == 0.0) return 0.0;
  if (std::isinf(euclid_deriv)) return euclid_deriv;
  if (!z.inverted() && !w.inverted()) {
    return euclid_deriv * (1.0 + std::norm(z.coord())) / (1.0 + std::norm(w.coord()));
  }
  const double log_factor = log_chart_factor(z) - log_chart_factor(w);
  return std::exp(std::log(euclid_deriv) + log_factor);
}

}  // namespace holocorr
