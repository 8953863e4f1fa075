#pragma once

// Reference enumerator for level sums. Shares nothing with the library beyond
// the coefficient grid: roots come from Eigen companion matrices, partials are
// formed inline, and every path is recomputed from the basepoint.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Grid = std::vector<std::vector<cplx>>;  // grid[i][j] multiplies a^i w^j

struct Curve {
  Grid g;
  bool anti = false;
};

inline cplx eval(const Grid& g, cplx a, cplx w) {
  cplx acc = 0;
  for (std::size_t i = g.size(); i-- > 0;) {
    cplx row = 0;
    for (std::size_t j = g[i].size(); j-- > 0;) row = row * w + g[i][j];
    acc = acc * a + row;
  }
  return acc;
}

inline cplx d_first(const Grid& g, cplx a, cplx w) {
  cplx acc = 0;
  for (std::size_t i = 1; i < g.size(); ++i)
    for (std::size_t j = 0; j < g[i].size(); ++j) acc += static_cast<double>(i) * g[i][j] * std::pow(a, static_cast<int>(i) - 1) * std::pow(w, static_cast<int>(j));
  return acc;
}

inline cplx d_second(const Grid& g, cplx a, cplx w) {
  cplx acc = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 1; j < g[i].size(); ++j) acc += static_cast<double>(j) * g[i][j] * std::pow(a, static_cast<int>(i)) * std::pow(w, static_cast<int>(j) - 1);
  return acc;
}

// Roots in w of P(a, w); the leading coefficient must not vanish.
inline std::vector<cplx> fibre(const Grid& g, cplx a) {
  std::size_t dw = 0;
  for (const auto& r : g) dw = std::max(dw, r.size() - 1);
  std::vector<cplx> c(dw + 1, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g[i].size(); ++j) c[j] += g[i][j] * std::pow(a, static_cast<int>(i));
  double scale = 0;
  for (auto v : c) scale = std::max(scale, std::abs(v));
  if (std::abs(c[dw]) < 1e-9 * scale) throw std::runtime_error("oracle: sheet escapes to infinity");
  std::vector<cplx> out;
  if (dw == 1) {
    out.push_back(-c[0] / c[1]);
    return out;
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dw), static_cast<Eigen::Index>(dw));
  for (std::size_t k = 0; k < dw; ++k) m(0, static_cast<Eigen::Index>(k)) = -c[dw - 1 - k] / c[dw];
  for (std::size_t k = 1; k < dw; ++k) m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    cplx w = es.eigenvalues()(k);
    for (int it = 0; it < 3; ++it) {
      cplx p = 0, dp = 0;
      for (std::size_t j = dw + 1; j-- > 0;) {
        dp = dp * w + p;
        p = p * w + c[j];
      }
      if (dp == cplx(0)) break;
      w -= p / dp;
    }
    out.push_back(w);
  }
  return out;
}

// |dw/dz| in the spherical metric for the sheet through (z, w).
inline double sph_deriv(const Curve& c, cplx z, cplx w) {
  const cplx a = c.anti ? std::conj(z) : z;
  const double e = std::abs(d_first(c.g, a, w) / d_second(c.g, a, w));
  return e * (1.0 + std::norm(z)) / (1.0 + std::norm(w));
}

// a[n] = sum over all length-n branch paths from x of prod |Df|^s.
inline std::vector<double> level_sums(const Curve& c, cplx x, double s, int depth) {
  std::vector<double> a(static_cast<std::size_t>(depth) + 1, 0.0);
  struct Frame {
    cplx z;
    double weight;
    int level;
  };
  std::vector<Frame> stack{{x, 1.0, 0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    a[static_cast<std::size_t>(f.level)] += std::pow(f.weight, s);
    if (f.level == depth) continue;
    for (cplx w : fibre(c.g, c.anti ? std::conj(f.z) : f.z)) stack.push_back({w, f.weight * sph_deriv(c, f.z, w), f.level + 1});
  }
  return a;
}

}  // namespace oracle
