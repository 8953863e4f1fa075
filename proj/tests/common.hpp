#pragma once

#include <random>

#include "holocorr/holocorr.hpp"

namespace testutil {

using holocorr::BiPoly;
using holocorr::Correspondence;
using holocorr::cplx;
using holocorr::SpherePoint;
using holocorr::UniPoly;

// F = inverse of z^2, P = w^2 - z
inline Correspondence squaring() { return holocorr::from_rational_inverse(UniPoly{0.0, 0.0, 1.0}, UniPoly{1.0}); }

// inverse of z^2 + 1/4
inline Correspondence cauliflower() { return holocorr::from_rational_inverse(UniPoly{0.25, 0.0, 1.0}, UniPoly{1.0}); }

// w - conj z
inline Correspondence conjugation() {
  return Correspondence(BiPoly(std::vector<std::vector<cplx>>{{0.0, 1.0}, {-1.0, 0.0}}), holocorr::Kind::antiholomorphic);
}

// f(w) = w + w^2/2
inline Correspondence llmm_quadratic() { return holocorr::llmm(UniPoly{0.0, 1.0, 0.5}, UniPoly{1.0}); }

inline double chordal(const SpherePoint& a, const SpherePoint& b) { return holocorr::chordal_distance(a, b); }

inline double nearest(const std::vector<SpherePoint>& pts, const SpherePoint& p) {
  double d = 4.0;
  for (const auto& q : pts) d = std::min(d, chordal(q, p));
  return d;
}

// Random point spread over the sphere (Cauchy radii hit both charts).
inline SpherePoint random_point(std::mt19937_64& rng) {
  std::cauchy_distribution<double> r(0.0, 1.0);
  std::uniform_real_distribution<double> a(0.0, 2.0 * std::numbers::pi);
  return SpherePoint(std::polar(std::abs(r(rng)), a(rng)));
}

}  // namespace testutil
