#pragma once

// Seeded property sweeps shared by the unit suite and the acceptance binary.
// Each returns the number of violations alongside how many cases were checked.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "common.hpp"
#include "oracles/naive_enumerator.hpp"

namespace props {

using namespace holocorr;
using namespace testutil;

struct Tally {
  int failures = 0;
  int checked = 0;
};

inline std::vector<Correspondence> zoo() {
  return {squaring(),
          cauliflower(),
          from_rational_inverse(UniPoly{1.0, cplx(0.2, -0.1), 0.0, 1.0}, UniPoly{0.3, 1.0}),
          bullett_penrose(4.0),
          bullett_penrose(cplx(3.0, 1.0)),
          llmm_quadratic(),
          llmm(UniPoly{0.0, 1.0, 0.0, 0.2}, UniPoly{1.0})};
}

inline std::string str(const SpherePoint& p) {
  if (p.is_infinity()) return "inf";
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.6g,%.6g)", p.value().real(), p.value().imag());
  return buf;
}

inline void report(const char* what, const SpherePoint& a, const SpherePoint& b, double v) {
  if (std::getenv("PROP_DEBUG")) std::printf("%s %s %s %g\n", what, str(a).c_str(), str(b).c_str(), v);
}

// Mix of generic points and chart seams: the unit circle and moduli on both
// sides of the internal chart switch, plus tiny moduli.
inline SpherePoint sample(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  switch (k % 10) {
    case 0: return SpherePoint(std::polar(1.0, ang(rng)));
    case 1: return SpherePoint(std::polar(kChartSwitch * (1.0 + 1e-3 * (ang(rng) - 3.0)), ang(rng)));
    case 2: return SpherePoint(std::polar(1e-7, ang(rng)));
    default: return random_point(rng);
  }
}

inline double min_gap(const std::vector<SpherePoint>& pts) {
  double g = 4.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) g = std::min(g, chordal(pts[i], pts[j]));
  return g;
}

inline std::size_t nearest_index(const std::vector<SpherePoint>& pts, const SpherePoint& p) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (chordal(pts[k], p) < chordal(pts[best], p)) best = k;
  return best;
}

// Perturb p by h in its unit chart.
inline SpherePoint nudge(const SpherePoint& p, cplx h) {
  if (p.is_infinity() || std::abs(p.value()) > 1.0) return SpherePoint::from_inverted(p.inverse_value() + h);
  return SpherePoint(p.value() + h);
}

// Spherical |Df| in an explicit chart pair, straight from the coefficient grid.
inline double chart_formula(const Correspondence& c, cplx z, cplx w, bool zinv, bool winv) {
  const auto g = c.poly().grid();
  const std::size_t dz = g.size() - 1, dw = g[0].size() - 1;
  oracle::Grid q(dz + 1, std::vector<cplx>(dw + 1));
  for (std::size_t i = 0; i <= dz; ++i)
    for (std::size_t j = 0; j <= dw; ++j) q[zinv ? dz - i : i][winv ? dw - j : j] = g[i][j];
  const cplx zc = zinv ? 1.0 / z : z, wc = winv ? 1.0 / w : w;
  const cplx a = c.anti() ? std::conj(zc) : zc;
  const double e = std::abs(oracle::d_first(q, a, wc) / oracle::d_second(q, a, wc));
  return e * (1.0 + std::norm(zc)) / (1.0 + std::norm(wc));
}

inline Tally multiplicity(int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto cs = zoo();
  Tally t;
  for (int k = 0; k < samples; ++k) {
    const auto& c = cs[static_cast<std::size_t>(k) % cs.size()];
    const auto p = k % 97 == 0 ? SpherePoint::infinity() : (k % 89 == 0 ? SpherePoint(0.0) : sample(rng, k));
    ++t.checked;
    if (c.forward(p).size() != static_cast<std::size_t>(c.dw()) || c.backward(p).size() != static_cast<std::size_t>(c.dz())) {
      ++t.failures;
      report("multiplicity", p, p, 0);
    }
  }
  return t;
}

inline Tally duality(int samples, std::uint64_t seed, double tol = 1e-8) {
  std::mt19937_64 rng(seed);
  const auto cs = zoo();
  Tally t;
  for (int k = 0; k < samples; ++k) {
    const auto& c = cs[static_cast<std::size_t>(k) % cs.size()];
    const auto z = sample(rng, k);
    for (const auto& w : c.forward(z)) {
      // z a near-double root of the backward fibre: only sqrt(eps) recoverable
      if (c.branch_derivative(z, w) < 1e-4) continue;
      ++t.checked;
      const double gap = nearest(c.backward(w), z);
      if (gap > tol) {
        ++t.failures;
        report("forward-dual", z, w, gap);
      }
    }
    const auto w = sample(rng, k + 3);
    for (const auto& zz : c.backward(w)) {
      if (c.branch_derivative(zz, w) > 1e4) continue;
      ++t.checked;
      const double gap = nearest(c.forward(zz), w);
      if (gap > tol) {
        ++t.failures;
        report("backward-dual", w, zz, gap);
      }
    }
  }
  return t;
}

inline Tally chain_rule(int samples, std::uint64_t seed, double tol = 1e-5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  const auto cs = zoo();
  Tally t;
  for (int k = 0; k < samples; ++k) {
    const auto& c = cs[static_cast<std::size_t>(k) % cs.size()];
    const auto z = random_point(rng);
    const auto ws = c.forward(z);
    const auto& w = ws[static_cast<std::size_t>(k) % ws.size()];
    const auto vs = c.forward(w);
    const auto& v = vs[static_cast<std::size_t>(k / 3) % vs.size()];
    // away from critical points and sheet collisions
    if (min_gap(ws) < 1e-2 || min_gap(vs) < 1e-2) continue;
    const double d1 = c.branch_derivative(z, w), d2 = c.branch_derivative(w, v);
    if (d1 < 1e-3 || d1 > 1e3 || d2 < 1e-3 || d2 > 1e3) continue;
    const cplx h = std::polar(1e-6, ang(rng));
    auto track = [&](const SpherePoint& zz) {
      const auto w2 = c.forward(zz);
      const auto& wn = w2[nearest_index(w2, w)];
      const auto v2 = c.forward(wn);
      return v2[nearest_index(v2, v)];
    };
    const SpherePoint zp = nudge(z, h), zm = nudge(z, -h);
    const double fd = chordal(track(zp), track(zm)) / chordal(zp, zm);
    ++t.checked;
    if (std::abs(fd / (d1 * d2) - 1.0) > tol) {
      ++t.failures;
      report("chain-rule", z, v, fd / (d1 * d2) - 1.0);
    }
  }
  return t;
}

// Library derivative against the formula evaluated in all four chart pairs
// (moderate moduli) or in the natural chart (extreme moduli).
inline Tally chart_independence(int samples, std::uint64_t seed, double tol = 1e-9) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  const auto cs = zoo();
  Tally t;
  for (int k = 0; k < samples; ++k) {
    const auto& c = cs[static_cast<std::size_t>(k) % cs.size()];
    const bool extreme = k % 4 == 3;
    SpherePoint z = random_point(rng);
    if (extreme) z = SpherePoint(std::polar((k % 8 == 3) ? 1e6 : 1e-6, ang(rng)));
    if (z.is_infinity()) continue;
    const double rz = std::abs(z.value());
    if (!extreme && (rz < 0.2 || rz > 5.0)) continue;
    for (const auto& w : c.forward(z)) {
      if (w.is_infinity()) continue;
      const double rw = std::abs(w.value());
      if (!extreme && (rw < 0.2 || rw > 5.0)) continue;
      const double lib = c.branch_derivative(z, w);
      // near critical points both sides lose digits to cancellation
      if (!(lib > 1e-4 && lib < 1e4)) continue;
      for (int chart = 0; chart < 4; ++chart) {
        const bool zi = chart & 2, wi = chart & 1;
        if (extreme && (zi != (rz > 1.0) || wi != (rw > 1.0))) continue;
        ++t.checked;
        const double ref = chart_formula(c, z.value(), w.value(), zi, wi);
        if (std::abs(ref / lib - 1.0) > tol) {
          ++t.failures;
          report("chart", z, w, ref / lib - 1.0);
        }
      }
    }
  }
  return t;
}

// branch_derivative(z, w) |R'(w)|_sph = 1 for F = R^{-1}.
inline Tally inverse_identity(int samples, std::uint64_t seed, double tol = 1e-8) {
  const UniPoly p{1.0, cplx(0.2, -0.1), 0.0, 1.0}, q{0.3, 1.0};
  const auto c = from_rational_inverse(p, q);
  const UniPoly dp = p.derivative(), dq = q.derivative();
  std::mt19937_64 rng(seed);
  Tally t;
  for (int k = 0; k < samples; ++k) {
    const auto z = random_point(rng);
    for (const auto& w : c.forward(z)) {
      if (w.is_infinity() || z.is_infinity()) continue;
      const cplx x = w.value();
      const cplx R = p(x) / q(x);
      const cplx dR = (dp(x) * q(x) - p(x) * dq(x)) / (q(x) * q(x));
      const double sph = std::abs(dR) * (1.0 + std::norm(x)) / (1.0 + std::norm(R));
      const double prod = c.branch_derivative(z, w) * sph;
      ++t.checked;
      if (!std::isfinite(prod) || std::abs(prod - 1.0) > tol) {
        ++t.failures;
        report("inverse-identity", z, w, prod - 1.0);
      }
    }
  }
  return t;
}

// Library level sums against the naive enumerator, max relative gap.
inline double bruteforce_gap(const Correspondence& c, cplx x, int depth) {
  double worst = 0.0;
  const oracle::Curve curve{c.poly().grid(), c.anti()};
  for (double s : {0.5, 1.0, 1.37, 2.0}) {
    const auto lib = level_sums(c, SpherePoint(x), s, depth);
    const auto ref = oracle::level_sums(curve, x, s, depth);
    if (lib.a.size() != ref.size()) return INFINITY;
    for (std::size_t n = 0; n < ref.size(); ++n) worst = std::max(worst, std::abs(lib.a[n] / ref[n] - 1.0));
  }
  return worst;
}

}  // namespace props
