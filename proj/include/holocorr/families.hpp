#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <json.hpp>

#include "holocorr/correspondence.hpp"
#include "holocorr/polyalg.hpp"

namespace holocorr {

namespace detail {

inline nlohmann::json coeffs_json(const UniPoly& p) {
  auto arr = nlohmann::json::array();
  for (auto v : p.coeffs()) arr.push_back({v.real(), v.imag()});
  return arr;
}

}  // namespace detail

/// F = R^{-1} for R = p/q, encoded as P(z, w) = p(w) - z q(w).
inline Correspondence from_rational_inverse(const UniPoly& p, const UniPoly& q) {
  if (q.is_zero()) throw Error(ErrorCode::invalid_argument, "rational-inverse: q is the zero polynomial");
  if (std::max(p.degree(), q.degree()) < 1) throw Error(ErrorCode::invalid_argument, "rational-inverse: R must have degree >= 1");
  // Common roots of p and q make R degenerate.
  const UniPoly& low = (p.degree() <= q.degree() && p.degree() >= 1) ? p : q;
  const UniPoly& other = (&low == &p) ? q : p;
  if (low.degree() >= 1 && !other.is_zero()) {
    for (auto r : roots(low, 1e-8)) {
      if (std::abs(other(r)) <= 1e-9 * std::max(other.eval_scale(r), 1e-300))
        throw Error(ErrorCode::common_factor, "rational-inverse: p and q share a root", {r.real(), r.imag()});
    }
  }
  std::vector<std::vector<cplx>> grid(2);
  grid[0] = p.coeffs();
  for (auto v : q.coeffs()) grid[1].push_back(-v);
  nlohmann::json params{{"p", detail::coeffs_json(p)}, {"q", detail::coeffs_json(q)}};
  return Correspondence(BiPoly(grid), Kind::holomorphic, "rational-inverse", params);
}

/// The 2-to-2 family
/// ((aw-1)/(w-1))^2 + ((aw-1)/(w-1))((az+1)/(z+1)) + ((az+1)/(z+1))^2 = 3
/// with denominators cleared.
inline Correspondence bullett_penrose(cplx a) {
  const BiPoly A = BiPoly::in_w(UniPoly{-1.0, a});     // aw - 1
  const BiPoly B = BiPoly::in_w(UniPoly{-1.0, 1.0});   // w - 1
  const BiPoly C = BiPoly::in_z(UniPoly{1.0, a});      // az + 1
  const BiPoly D = BiPoly::in_z(UniPoly{1.0, 1.0});    // z + 1
  const BiPoly P = A * A * D * D + A * B * C * D + C * C * B * B - cplx(3.0, 0.0) * (B * B * D * D);
  if (P.is_zero() || P.dz() != 2 || P.dw() != 2)
    throw Error(ErrorCode::degree_collapse, "bullett-penrose: parameter collapses the curve", {a.real(), a.imag()});
  Correspondence c(P, Kind::holomorphic, "bullett-penrose", {{"a", {a.real(), a.imag()}}});
  if (c.dz() != 2 || c.dw() != 2)
    throw Error(ErrorCode::degree_collapse, "bullett-penrose: parameter collapses the curve", {a.real(), a.imag()});
  return c;
}

/// Antiholomorphic correspondence {w : (f(w) - f(eta(z)))/(w - eta(z)) = 0},
/// eta(z) = 1/conj(z), for f = p/q of degree >= 2. Univalence of f on the
/// closed disk is the caller's responsibility (see univalence_diagnostic).
inline Correspondence llmm(const UniPoly& p, const UniPoly& q) {
  if (q.is_zero()) throw Error(ErrorCode::invalid_argument, "llmm: q is the zero polynomial");
  if (std::max(p.degree(), q.degree()) < 2) throw Error(ErrorCode::invalid_argument, "llmm: f must have degree d+1 >= 2");
  // N(u, w) = p(w) q(u) - p(u) q(w), u in the first slot.
  const BiPoly N = BiPoly::in_w(p) * BiPoly::in_z(q) - BiPoly::in_z(p) * BiPoly::in_w(q);
  BiPoly Q;
  try {
    Q = divide_exact(N);
  } catch (const Error& e) {
    throw Error(ErrorCode::not_divisible, std::string("llmm: malformed f: ") + e.what(), e.data());
  }
  // u = 1/conj(z): multiply through by conj(z)^deg_u.
  const BiPoly P = Q.reversed_z();
  nlohmann::json params{{"p", detail::coeffs_json(p)}, {"q", detail::coeffs_json(q)}};
  return Correspondence(P, Kind::antiholomorphic, "llmm", params);
}

struct UnivalenceDiagnostic {
  bool injective_on_boundary = false;
  double min_separation_ratio = 0.0;  ///< min |f(a)-f(b)| / |a-b| over boundary pairs
  bool pole_free = false;             ///< no root of q in the closed disk
};

/// Sampled check of the standing univalence hypothesis: pairwise
/// injectivity of f on the unit circle and absence of poles in the disk.
inline UnivalenceDiagnostic univalence_diagnostic(const UniPoly& p, const UniPoly& q, int samples = 256) {
  UnivalenceDiagnostic d;
  std::vector<cplx> z(static_cast<std::size_t>(samples)), fz(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    z[static_cast<std::size_t>(k)] = std::polar(1.0, 2.0 * std::numbers::pi * k / samples);
    fz[static_cast<std::size_t>(k)] = p(z[static_cast<std::size_t>(k)]) / q(z[static_cast<std::size_t>(k)]);
  }
  double ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) ratio = std::min(ratio, std::abs(fz[i] - fz[j]) / std::abs(z[i] - z[j]));
  d.min_separation_ratio = ratio;
  d.injective_on_boundary = ratio > 1e-6;
  d.pole_free = true;
  if (q.degree() >= 1)
    for (auto r : roots(q, 1e-8))
      if (std::abs(r) <= 1.0 + 1e-12) d.pole_free = false;
  return d;
}

}  // namespace holocorr
