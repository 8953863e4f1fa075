#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "holocorr/error.hpp"
#include "holocorr/sphere.hpp"

namespace holocorr {

/// Univariate complex polynomial, ascending coefficients. Exactly-zero
/// leading coefficients are trimmed; the zero polynomial has no coefficients.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { trim(); }
  UniPoly(std::initializer_list<cplx> coeffs) : c_(coeffs) { trim(); }

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<cplx>& coeffs() const { return c_; }
  cplx operator[](std::size_t i) const { return i < c_.size() ? c_[i] : cplx{}; }
  cplx leading() const { return c_.empty() ? cplx{} : c_.back(); }

  cplx operator()(cplx z) const {
    cplx acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  /// Sum |c_i| |z|^i, the natural magnitude against which p(z) is small.
  double eval_scale(cplx z) const {
    const double r = std::abs(z);
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
  }

  double max_abs() const {
    double m = 0.0;
    for (auto v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  UniPoly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
    return UniPoly(std::move(d));
  }

  /// Coefficients reversed: z^deg p(1/z).
  UniPoly reversed() const { return UniPoly(std::vector<cplx>(c_.rbegin(), c_.rend())); }

  friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<cplx> r(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return UniPoly(std::move(r));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == cplx(0.0, 0.0)) c_.pop_back();
  }
  std::vector<cplx> c_;
};

namespace detail {

inline bool lex_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

/// p/p' evaluated stably; uses the reversed polynomial outside the unit disk.
inline cplx newton_ratio(const std::vector<cplx>& c, cplx z, bool& exact_root) {
  const std::size_t n = c.size() - 1;
  exact_root = false;
  if (std::abs(z) <= 1.0) {
    cplx p = c[n], dp{};
    for (std::size_t k = n; k-- > 0;) {
      dp = dp * z + p;
      p = p * z + c[k];
    }
    if (p == cplx(0.0, 0.0)) {
      exact_root = true;
      return {};
    }
    return p / dp;
  }
  const cplx y = 1.0 / z;
  cplx r = c[0], dr{};
  for (std::size_t k = 1; k <= n; ++k) {
    dr = dr * y + r;
    r = r * y + c[k];
  }
  if (r == cplx(0.0, 0.0)) {
    exact_root = true;
    return {};
  }
  return 1.0 / (y * (static_cast<double>(n) - y * dr / r));
}

inline std::vector<cplx> aberth(const std::vector<cplx>& c, int max_iter, bool& converged) {
  const std::size_t n = c.size() - 1;
  const double eps = std::numeric_limits<double>::epsilon();
  const double radius = std::pow(std::abs(c[0]) / std::abs(c[n]), 1.0 / static_cast<double>(n));
  const cplx center = -c[n - 1] / (static_cast<double>(n) * c[n]);
  const double rad = std::max(radius, std::abs(center)) + 1e-3;
  std::vector<cplx> z(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n) + 0.4;
    z[k] = rad * cplx(std::cos(theta), std::sin(theta));
  }
  std::vector<bool> done(n, false);
  UniPoly p(c);
  converged = false;
  for (int it = 0; it < max_iter; ++it) {
    bool all = true;
    for (std::size_t k = 0; k < n; ++k) {
      if (done[k]) continue;
      bool exact = false;
      const cplx ratio = newton_ratio(c, z[k], exact);
      if (exact) {
        done[k] = true;
        continue;
      }
      cplx sum{};
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      const cplx step = ratio / (1.0 - ratio * sum);
      z[k] -= step;
      const double mag = std::abs(z[k]);
      if (std::abs(step) <= 4.0 * eps * std::max(mag, 1e-300) ||
          std::abs(p(z[k])) <= 8.0 * eps * p.eval_scale(z[k])) {
        done[k] = true;
      } else {
        all = false;
      }
    }
    if (all) {
      converged = true;
      break;
    }
  }
  return z;
}

inline std::vector<cplx> companion_roots(const std::vector<cplx>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) m(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) m(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  std::vector<cplx> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return out;
}

/// Roots closer than the split a k-fold root undergoes in floating point are
/// replaced by their centroid, repeated k times.
inline void merge_clusters(std::vector<cplx>& roots, std::size_t degree) {
  constexpr double kClusterTol = 1e-15;
  const std::size_t n = roots.size();
  if (n < 2) return;
  auto threshold = [&](std::size_t k, cplx at) {
    return 10.0 * std::pow(kClusterTol, 1.0 / static_cast<double>(k)) * std::max(1.0, std::abs(at));
  };
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  const std::size_t kmax = std::max<std::size_t>(2, degree);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(roots[i] - roots[j]) <= threshold(kmax, roots[i])) parent[find(i)] = find(j);
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  for (const auto& g : groups) {
    if (g.size() < 2) continue;
    cplx centroid{};
    for (auto i : g) centroid += roots[i];
    centroid /= static_cast<double>(g.size());
    double diameter = 0.0;
    for (auto i : g)
      for (auto j : g) diameter = std::max(diameter, std::abs(roots[i] - roots[j]));
    if (diameter <= threshold(g.size(), centroid))
      for (auto i : g) roots[i] = centroid;
  }
}

}  // namespace detail

/// All deg(p) roots with multiplicity, sorted by (re, im). Each root r
/// satisfies |p(r)| <= tol * sum|c_i||r|^i. Aberth-Ehrlich iteration with a
/// companion-matrix fallback.
inline std::vector<cplx> roots(const UniPoly& p, double tol = 1e-12) {
  if (p.is_zero()) throw Error(ErrorCode::zero_polynomial, "roots: zero polynomial");
  const auto& all = p.coeffs();
  std::size_t zeros = 0;
  while (zeros < all.size() && all[zeros] == cplx(0.0, 0.0)) ++zeros;
  std::vector<cplx> c(all.begin() + static_cast<std::ptrdiff_t>(zeros), all.end());
  std::vector<cplx> raw;
  const std::size_t n = c.size() - 1;
  if (n == 1) {
    raw.push_back(-c[0] / c[1]);
  } else if (n == 2) {
    const cplx a = c[2], b = c[1], cc = c[0];
    const cplx disc = std::sqrt(b * b - 4.0 * a * cc);
    const cplx q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
    if (q == cplx(0.0, 0.0)) {
      raw = {cplx{}, cplx{}};
    } else {
      raw = {q / a, cc / q};
    }
  } else if (n > 2) {
    bool ok = false;
    raw = detail::aberth(c, 500, ok);
    if (!ok) raw = detail::companion_roots(c);
  }
  auto failures = [&](const std::vector<cplx>& zs) {
    std::vector<double> bad;
    for (auto r : zs) {
      const double res = std::abs(p(r));
      if (res > tol * std::max(p.eval_scale(r), 1e-300)) bad.push_back(res);
    }
    return bad;
  };
  // Cluster merging is kept only when the merged roots still satisfy the
  // residual test; tiny distinct roots would otherwise collapse.
  std::vector<cplx> merged = raw;
  detail::merge_clusters(merged, n);
  std::vector<cplx> chosen = merged;
  auto bad = failures(merged);
  if (!bad.empty() && merged != raw) {
    auto bad_raw = failures(raw);
    if (bad_raw.empty()) {
      chosen = raw;
      bad.clear();
    }
  }
  if (!bad.empty())
    throw Error(ErrorCode::no_convergence, "roots: residual above tolerance for " + std::to_string(bad.size()) + " root(s)", bad);
  std::vector<cplx> out(zeros, cplx(0.0, 0.0));
  out.insert(out.end(), chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end(), detail::lex_less);
  return out;
}

/// Bivariate polynomial sum c[i][j] z^i w^j with tight degrees.
class BiPoly {
 public:
  BiPoly() = default;

  /// grid[i][j] multiplies z^i w^j. Ragged rows are zero-padded.
  explicit BiPoly(const std::vector<std::vector<cplx>>& grid) {
    std::size_t cols = 0;
    for (const auto& row : grid) cols = std::max(cols, row.size());
    rows_ = grid.size();
    cols_ = cols;
    c_.assign(rows_ * cols_, cplx{});
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < grid[i].size(); ++j) c_[i * cols_ + j] = grid[i][j];
    tighten();
  }

  static BiPoly from_flat(std::size_t rows, std::size_t cols, std::vector<cplx> flat) {
    BiPoly p;
    p.rows_ = rows;
    p.cols_ = cols;
    p.c_ = std::move(flat);
    p.tighten();
    return p;
  }

  /// Polynomial in z only (w-degree 0).
  static BiPoly in_z(const UniPoly& u) {
    std::vector<std::vector<cplx>> g;
    for (auto v : u.coeffs()) g.push_back({v});
    return BiPoly(g);
  }
  /// Polynomial in w only.
  static BiPoly in_w(const UniPoly& u) { return BiPoly({u.coeffs()}); }

  bool is_zero() const { return c_.empty(); }
  int dz() const { return static_cast<int>(rows_) - 1; }
  int dw() const { return static_cast<int>(cols_) - 1; }
  cplx at(std::size_t i, std::size_t j) const {
    return (i < rows_ && j < cols_) ? c_[i * cols_ + j] : cplx{};
  }
  const std::vector<cplx>& flat() const { return c_; }

  std::vector<std::vector<cplx>> grid() const {
    std::vector<std::vector<cplx>> g(rows_, std::vector<cplx>(cols_));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) g[i][j] = c_[i * cols_ + j];
    return g;
  }

  double max_abs() const {
    double m = 0.0;
    for (auto v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  cplx operator()(cplx z, cplx w) const {
    cplx acc{};
    for (std::size_t i = rows_; i-- > 0;) {
      cplx row{};
      for (std::size_t j = cols_; j-- > 0;) row = row * w + c_[i * cols_ + j];
      acc = acc * z + row;
    }
    return acc;
  }

  /// sum |c_ij| |z|^i |w|^j
  double eval_scale(cplx z, cplx w) const {
    const double rz = std::abs(z), rw = std::abs(w);
    double acc = 0.0;
    for (std::size_t i = rows_; i-- > 0;) {
      double row = 0.0;
      for (std::size_t j = cols_; j-- > 0;) row = row * rw + std::abs(c_[i * cols_ + j]);
      acc = acc * rz + row;
    }
    return acc;
  }

  /// P(z0, .) as a polynomial in w, with formal degree dw (trailing zeros kept
  /// out of UniPoly, so compare degree() with dw() to see drops).
  UniPoly slice_w(cplx z0) const {
    std::vector<cplx> out(cols_);
    for (std::size_t j = 0; j < cols_; ++j) {
      cplx acc{};
      for (std::size_t i = rows_; i-- > 0;) acc = acc * z0 + c_[i * cols_ + j];
      out[j] = acc;
    }
    return UniPoly(std::move(out));
  }

  /// P(., w0) as a polynomial in z.
  UniPoly slice_z(cplx w0) const {
    std::vector<cplx> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      cplx acc{};
      for (std::size_t j = cols_; j-- > 0;) acc = acc * w0 + c_[i * cols_ + j];
      out[i] = acc;
    }
    return UniPoly(std::move(out));
  }

  /// Coefficient of w^j as a polynomial in z.
  UniPoly column(std::size_t j) const {
    std::vector<cplx> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = at(i, j);
    return UniPoly(std::move(out));
  }

  /// Coefficient of z^i as a polynomial in w.
  UniPoly row(std::size_t i) const {
    std::vector<cplx> out(cols_);
    for (std::size_t j = 0; j < cols_; ++j) out[j] = at(i, j);
    return UniPoly(std::move(out));
  }

  /// P(z, z).
  UniPoly diagonal() const {
    if (is_zero()) return {};
    std::vector<cplx> out(rows_ + cols_ - 1);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i + j] += c_[i * cols_ + j];
    return UniPoly(std::move(out));
  }

  BiPoly partial_z() const {
    if (rows_ <= 1) return {};
    std::vector<cplx> f((rows_ - 1) * cols_);
    for (std::size_t i = 1; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) f[(i - 1) * cols_ + j] = c_[i * cols_ + j] * static_cast<double>(i);
    return from_flat(rows_ - 1, cols_, std::move(f));
  }

  BiPoly partial_w() const {
    if (cols_ <= 1) return {};
    std::vector<cplx> f(rows_ * (cols_ - 1));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 1; j < cols_; ++j) f[i * (cols_ - 1) + j - 1] = c_[i * cols_ + j] * static_cast<double>(j);
    return from_flat(rows_, cols_ - 1, std::move(f));
  }

  /// z^dz P(1/z, w)
  BiPoly reversed_z() const {
    std::vector<cplx> f(c_.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) f[(rows_ - 1 - i) * cols_ + j] = c_[i * cols_ + j];
    return from_flat(rows_, cols_, std::move(f));
  }

  /// w^dw P(z, 1/w)
  BiPoly reversed_w() const {
    std::vector<cplx> f(c_.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) f[i * cols_ + (cols_ - 1 - j)] = c_[i * cols_ + j];
    return from_flat(rows_, cols_, std::move(f));
  }

  /// P(w, z): variables exchanged.
  BiPoly transposed() const {
    std::vector<cplx> f(c_.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) f[j * rows_ + i] = c_[i * cols_ + j];
    return from_flat(cols_, rows_, std::move(f));
  }

  friend BiPoly operator+(const BiPoly& a, const BiPoly& b) {
    const std::size_t r = std::max(a.rows_, b.rows_), c = std::max(a.cols_, b.cols_);
    std::vector<cplx> f(r * c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) f[i * c + j] = a.at(i, j) + b.at(i, j);
    return from_flat(r, c, std::move(f));
  }

  friend BiPoly operator*(cplx s, const BiPoly& a) {
    std::vector<cplx> f = a.c_;
    for (auto& v : f) v *= s;
    return from_flat(a.rows_, a.cols_, std::move(f));
  }

  friend BiPoly operator-(const BiPoly& a, const BiPoly& b) { return a + cplx(-1.0, 0.0) * b; }

  friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    const std::size_t r = a.rows_ + b.rows_ - 1, c = a.cols_ + b.cols_ - 1;
    std::vector<cplx> f(r * c);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j)
        for (std::size_t k = 0; k < b.rows_; ++k)
          for (std::size_t l = 0; l < b.cols_; ++l) f[(i + k) * c + (j + l)] += a.c_[i * a.cols_ + j] * b.c_[k * b.cols_ + l];
    return from_flat(r, c, std::move(f));
  }

 private:
  void tighten() {
    auto row_zero = [&](std::size_t i) {
      for (std::size_t j = 0; j < cols_; ++j)
        if (c_[i * cols_ + j] != cplx(0.0, 0.0)) return false;
      return true;
    };
    auto col_zero = [&](std::size_t j) {
      for (std::size_t i = 0; i < rows_; ++i)
        if (c_[i * cols_ + j] != cplx(0.0, 0.0)) return false;
      return true;
    };
    std::size_t r = rows_, c = cols_;
    while (r > 0 && row_zero(r - 1)) --r;
    while (c > 0 && col_zero(c - 1)) --c;
    if (r == 0 || c == 0) {
      rows_ = cols_ = 0;
      c_.clear();
      return;
    }
    if (r == rows_ && c == cols_) return;
    std::vector<cplx> f(r * c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) f[i * c + j] = c_[i * cols_ + j];
    rows_ = r;
    cols_ = c;
    c_ = std::move(f);
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> c_;
};

/// Exact quotient of N(u, w) by (w - u), where u is the first variable.
/// Throws not_divisible when the remainder exceeds tol * max|N|.
inline BiPoly divide_exact(const BiPoly& numerator, double tol = 1e-10) {
  if (numerator.is_zero()) return {};
  const int dw = numerator.dw();
  if (dw < 1) throw Error(ErrorCode::not_divisible, "divide_exact: numerator has no w-dependence");
  // Synthetic division in w with coefficients in C[u]: q_{j-1} = n_j + u q_j.
  const std::size_t rows = static_cast<std::size_t>(numerator.dz()) + static_cast<std::size_t>(dw) + 1;
  std::vector<std::vector<cplx>> q(static_cast<std::size_t>(dw), std::vector<cplx>(rows));
  auto column = [&](int j) {
    std::vector<cplx> col(rows);
    for (std::size_t i = 0; i <= static_cast<std::size_t>(numerator.dz()); ++i) col[i] = numerator.at(i, static_cast<std::size_t>(j));
    return col;
  };
  std::vector<cplx> carry = column(dw);
  for (int j = dw - 1; j >= 0; --j) {
    q[static_cast<std::size_t>(j)] = carry;
    auto next = column(j);
    for (std::size_t i = 0; i + 1 < rows; ++i) next[i + 1] += carry[i];
    carry = std::move(next);
  }
  double rem = 0.0;
  for (auto v : carry) rem = std::max(rem, std::abs(v));
  if (rem > tol * numerator.max_abs())
    throw Error(ErrorCode::not_divisible, "divide_exact: nonzero remainder", {rem});
  std::vector<std::vector<cplx>> grid(rows, std::vector<cplx>(static_cast<std::size_t>(dw)));
  for (std::size_t j = 0; j < static_cast<std::size_t>(dw); ++j)
    for (std::size_t i = 0; i < rows; ++i) grid[i][j] = q[j][i];
  return BiPoly(grid);
}

struct ResultantResult {
  UniPoly poly;
  bool identically_zero = false;
};

namespace detail {

inline cplx sylvester_det(const UniPoly& a, int m, const UniPoly& b, int n) {
  const int size = m + n;
  if (size == 0) return {1.0, 0.0};
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(size, size);
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) s(r, r + k) = a[static_cast<std::size_t>(m - k)];
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) s(n + r, r + k) = b[static_cast<std::size_t>(n - k)];
  return s.partialPivLu().determinant();
}

}  // namespace detail

/// Res_z(P, Q) as a polynomial in w, by evaluation at roots of unity and
/// discrete Fourier interpolation. Formal z-degrees are used throughout.
inline ResultantResult resultant_z(const BiPoly& p, const BiPoly& q) {
  if (p.is_zero() || q.is_zero()) return {{}, true};
  const int m = p.dz(), n = q.dz();
  const int bound = m * q.dw() + n * p.dw();
  const int samples = bound + 1;
  std::vector<cplx> values(static_cast<std::size_t>(samples));
  double scale = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / samples;
    const cplx w(std::cos(theta), std::sin(theta));
    const UniPoly a = p.slice_z(w), b = q.slice_z(w);
    double na = 0.0, nb = 0.0;
    for (int i = 0; i <= m; ++i) na += std::norm(a[static_cast<std::size_t>(i)]);
    for (int i = 0; i <= n; ++i) nb += std::norm(b[static_cast<std::size_t>(i)]);
    scale = std::max(scale, std::pow(std::sqrt(na), n) * std::pow(std::sqrt(nb), m));
    values[static_cast<std::size_t>(k)] = detail::sylvester_det(a, m, b, n);
  }
  std::vector<cplx> coeffs(static_cast<std::size_t>(samples));
  double vmax = 0.0;
  for (auto v : values) vmax = std::max(vmax, std::abs(v));
  if (vmax <= 1e-10 * scale) return {{}, true};
  for (int j = 0; j < samples; ++j) {
    cplx acc{};
    for (int k = 0; k < samples; ++k) {
      const double theta = -2.0 * std::numbers::pi * static_cast<double>(j) * k / samples;
      acc += values[static_cast<std::size_t>(k)] * cplx(std::cos(theta), std::sin(theta));
    }
    coeffs[static_cast<std::size_t>(j)] = acc / static_cast<double>(samples);
  }
  double cmax = 0.0;
  for (auto v : coeffs) cmax = std::max(cmax, std::abs(v));
  for (auto& v : coeffs)
    if (std::abs(v) <= 1e-11 * cmax) v = {};
  return {UniPoly(std::move(coeffs)), false};
}

/// Res_w(P, Q) as a polynomial in z.
inline ResultantResult resultant_w(const BiPoly& p, const BiPoly& q) {
  return resultant_z(p.transposed(), q.transposed());
}

/// Result of stripping factors that depend on one variable only.
struct ContentRemoval {
  BiPoly poly;
  std::vector<cplx> removed_z;  ///< vertical lines z = a
  std::vector<cplx> removed_w;  ///< horizontal lines w = b
};

namespace detail {

/// Divides every column (polynomial in z) by (z - r).
inline BiPoly divide_columns(const BiPoly& p, cplx r) {
  const std::size_t rows = static_cast<std::size_t>(p.dz()) + 1, cols = static_cast<std::size_t>(p.dw()) + 1;
  std::vector<cplx> f((rows - 1) * cols);
  for (std::size_t j = 0; j < cols; ++j) {
    cplx carry{};
    for (std::size_t i = rows; i-- > 1;) {
      carry = p.at(i, j) + r * carry;
      f[(i - 1) * cols + j] = carry;
    }
  }
  return BiPoly::from_flat(rows - 1, cols, std::move(f));
}

inline bool common_column_root(const BiPoly& p, cplx r) {
  for (int j = 0; j <= p.dw(); ++j) {
    const UniPoly col = p.column(static_cast<std::size_t>(j));
    if (col.is_zero()) continue;
    if (std::abs(col(r)) > 1e-10 * std::max(col.eval_scale(r), 1e-300)) return false;
  }
  return true;
}

inline BiPoly strip_z_content(BiPoly p, std::vector<cplx>& removed) {
  while (p.dz() >= 1) {
    int best = -1, best_deg = std::numeric_limits<int>::max();
    for (int j = 0; j <= p.dw(); ++j) {
      const int d = p.column(static_cast<std::size_t>(j)).degree();
      if (d >= 0 && d < best_deg) {
        best_deg = d;
        best = j;
      }
    }
    if (best < 0 || best_deg == 0) break;
    bool found = false;
    for (cplx r : roots(p.column(static_cast<std::size_t>(best)), 1e-8)) {
      if (common_column_root(p, r)) {
        p = divide_columns(p, r);
        removed.push_back(r);
        found = true;
        break;
      }
    }
    if (!found) break;
  }
  return p;
}

}  // namespace detail

/// Removes univariate factors (vertical and horizontal lines) from P.
inline ContentRemoval remove_content(const BiPoly& p) {
  ContentRemoval out;
  BiPoly q = detail::strip_z_content(p, out.removed_z);
  q = detail::strip_z_content(q.transposed(), out.removed_w).transposed();
  out.poly = std::move(q);
  return out;
}

}  // namespace holocorr
