#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "holocorr/correspondence.hpp"
#include "holocorr/error.hpp"
#include "holocorr/orbits.hpp"
#include "holocorr/parallel.hpp"

namespace holocorr {

struct LevelSums {
  double s = 0.0;
  std::vector<double> a;      ///< a[n] = sum over level-n branches of |Df|^s
  std::vector<double> log_a;  ///< log a[n]; -inf when a[n] = 0
};

struct PoincareOptions {
  std::size_t node_budget = 20'000'000;
  unsigned threads = 1;
  double parabolic_tol = 1e-9;  ///< orbit nodes this close to an indifferent fixed point are rejected
  bool check_parabolic = true;
};

/// Log branch weights of the exact orbit tree, level by level. Points are
/// discarded once their children exist, so only weights are kept.
class LevelWeights {
 public:
  LevelWeights() = default;

  int depth() const { return static_cast<int>(offsets_.size()) - 2; }
  std::size_t level_size(int n) const { return offsets_[static_cast<std::size_t>(n) + 1] - offsets_[static_cast<std::size_t>(n)]; }
  std::span<const double> level(int n) const {
    return {log_w_.data() + offsets_[static_cast<std::size_t>(n)], level_size(n)};
  }

  /// log of sum_j exp(s * lw_j) over level n.
  double log_level_sum(int n, double s, unsigned threads) const {
    const auto lw = level(n);
    double m = -std::numeric_limits<double>::infinity();
    for (double v : lw) m = std::max(m, s * v);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    const double total = deterministic_sum(lw.size(), threads, [&](std::size_t i) { return std::exp(s * lw[i] - m); });
    return m + std::log(total);
  }

  LevelSums sums(double s, unsigned threads = 1) const {
    return sums_with([s](int) { return s; }, s, threads);
  }

  /// Level sums with a level-dependent exponent t(n).
  template <class Exponent>
  LevelSums sums_with(Exponent&& t, double s, unsigned threads = 1) const {
    LevelSums ls;
    ls.s = s;
    for (int n = 0; n <= depth(); ++n) {
      const double la = log_level_sum(n, t(n), threads);
      ls.log_a.push_back(la);
      ls.a.push_back(std::exp(la));
    }
    return ls;
  }

  friend LevelWeights level_weights(const Correspondence&, const SpherePoint&, int, const PoincareOptions&);

 private:
  std::vector<double> log_w_;
  std::vector<std::size_t> offsets_;
};

/// Exact expansion of the orbit tree of x recording log branch weights.
inline LevelWeights level_weights(const Correspondence& c, const SpherePoint& x, int depth, const PoincareOptions& opt = {}) {
  if (depth < 0) throw Error(ErrorCode::invalid_argument, "level_weights: depth must be >= 0");
  const auto dw = static_cast<std::size_t>(c.dw());
  std::size_t total = 0, width = 1;
  for (int n = 0; n <= depth; ++n) {
    detail::check_budget(width, opt.node_budget, n);
    total += width;
    width *= dw;
  }
  std::vector<SpherePoint> parabolic;
  if (opt.check_parabolic)
    for (const auto& fp : c.fixed_points())
      if (fp.cls == FixedClass::indifferent) parabolic.push_back(fp.point);
  auto check_node = [&](const SpherePoint& p) {
    for (const auto& w : parabolic)
      if (chordal_distance(p, w) <= opt.parabolic_tol)
        throw Error(ErrorCode::parabolic_basepoint, "orbit of the basepoint lands on an indifferent fixed point; the series diverges",
                    {w.is_infinity() ? INFINITY : w.value().real(), w.is_infinity() ? 0.0 : w.value().imag()});
  };
  LevelWeights lw;
  lw.log_w_.reserve(total);
  lw.log_w_.push_back(0.0);
  lw.offsets_ = {0, 1};
  check_node(x);
  std::vector<SpherePoint> cur{x};
  for (int n = 0; n < depth; ++n) {
    std::vector<SpherePoint> next(cur.size() * dw);
    const std::size_t base = lw.offsets_[static_cast<std::size_t>(n)];
    const std::size_t out = lw.log_w_.size();
    lw.log_w_.resize(out + next.size());
    parallel_for(cur.size(), opt.threads, [&](std::size_t i0, std::size_t i1) {
      for (std::size_t i = i0; i < i1; ++i) {
        const auto germs = c.germs(cur[i]);
        for (std::size_t k = 0; k < dw; ++k) {
          const std::size_t slot = i * dw + k;
          next[slot] = germs[k].w;
          lw.log_w_[out + slot] = detail::child_log_weight(lw.log_w_[base + i], germs[k].deriv_sph);
          check_node(germs[k].w);
        }
      }
    });
    for (std::size_t i = out; i < lw.log_w_.size(); ++i)
      if (lw.log_w_[i] == std::numeric_limits<double>::infinity())
        throw Error(ErrorCode::infinite_weight, "branch derivative is infinite along the orbit (basepoint on the postcritical set of the inverse)",
                    {static_cast<double>(n + 1)});
    lw.offsets_.push_back(lw.log_w_.size());
    cur = std::move(next);
  }
  return lw;
}

inline LevelSums level_sums(const Correspondence& c, const SpherePoint& x, double s, int depth, const PoincareOptions& opt = {}) {
  if (!(s > 0.0)) throw Error(ErrorCode::invalid_argument, "level_sums: s must be positive");
  return level_weights(c, x, depth, opt).sums(s, opt.threads);
}

inline double partial_sum(const LevelSums& ls) {
  return pairwise_sum(ls.a);
}

inline double poincare_partial_sum(const Correspondence& c, const SpherePoint& x, double s, int depth, const PoincareOptions& opt = {}) {
  return partial_sum(level_sums(c, x, s, depth, opt));
}

/// Level sums with exponent 2*delta - s below the level threshold h(1/(s - delta)), s afterwards.
inline LevelSums modified_level_sums(const LevelWeights& w, double s, double delta, const std::function<long(double)>& h,
                                     unsigned threads = 1) {
  if (!h) throw Error(ErrorCode::invalid_argument, "modified_level_sums: threshold function required");
  if (s == delta) return w.sums(s, threads);
  const long threshold = h(1.0 / (s - delta));
  return w.sums_with([&](int n) { return n < threshold ? 2.0 * delta - s : s; }, s, threads);
}

inline LevelSums modified_level_sums(const Correspondence& c, const SpherePoint& x, double s, double delta, int depth,
                                     const std::function<long(double)>& h, const PoincareOptions& opt = {}) {
  return modified_level_sums(level_weights(c, x, depth, opt), s, delta, h, opt.threads);
}

struct GrowthFit {
  double rho = std::numeric_limits<double>::quiet_NaN();
  double slope = std::numeric_limits<double>::quiet_NaN();  ///< fitted d(log a[n])/dn
  double r2 = 0.0;
  int first_level = 0;
  int levels_used = 0;
  bool degenerate = false;  ///< fewer than 4 positive tail sums
};

/// exp of the least-squares slope of log a[n] against n over the last
/// tail_fraction of the levels (level 0 excluded).
inline GrowthFit growth_rate(const LevelSums& ls, double tail_fraction = 0.5) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw Error(ErrorCode::invalid_argument, "growth_rate: tail_fraction must lie in (0, 1]");
  GrowthFit fit;
  const int depth = static_cast<int>(ls.log_a.size()) - 1;
  const int count = std::max(1, static_cast<int>(std::ceil(tail_fraction * depth)));
  fit.first_level = std::max(1, depth - count + 1);
  std::vector<double> xs, ys;
  for (int n = fit.first_level; n <= depth; ++n) {
    const double y = ls.log_a[static_cast<std::size_t>(n)];
    if (!std::isfinite(y)) continue;
    xs.push_back(n);
    ys.push_back(y);
  }
  fit.levels_used = static_cast<int>(xs.size());
  if (xs.size() < 4) {
    fit.degenerate = true;
    return fit;
  }
  const double k = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.rho = std::exp(fit.slope);
  const double sse = std::max(0.0, syy - fit.slope * sxy);
  fit.r2 = syy <= 1e-300 * k ? 1.0 : 1.0 - sse / syy;
  return fit;
}

struct RhoSample {
  double s = 0.0;
  double rho = 0.0;
  double r2 = 0.0;
};

struct DeltaEstimate {
  double delta = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double rho_at_delta = 0.0;
  double r2_at_delta = 0.0;
  int depth = 0;
  int iterations = 0;
  std::vector<RhoSample> samples;  ///< every evaluation in call order
};

struct DeltaOptions {
  double tail_fraction = 0.5;
  double margin = 1e-6;
  PoincareOptions poincare;
};

/// Root of rho(s) = 1 by bisection on [s_lo, s_hi] using one exact expansion.
inline DeltaEstimate critical_exponent(const LevelWeights& w, double s_lo, double s_hi, double tol, const DeltaOptions& opt = {}) {
  if (!(s_lo > 0.0 && s_hi > s_lo)) throw Error(ErrorCode::invalid_argument, "critical_exponent: need 0 < s_lo < s_hi");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "critical_exponent: tol must be positive");
  DeltaEstimate est;
  est.depth = w.depth();
  auto rho = [&](double s) {
    const auto fit = growth_rate(w.sums(s, opt.poincare.threads), opt.tail_fraction);
    if (fit.degenerate)
      throw Error(ErrorCode::degenerate_fit, "critical_exponent: fewer than 4 positive tail level sums at s = " + format_double(s), {s});
    est.samples.push_back({s, fit.rho, fit.r2});
    return fit;
  };
  double lo = s_lo, hi = s_hi;
  double r_lo = rho(lo).rho, r_hi = rho(hi).rho;
  if (r_hi >= 1.0 - opt.margin) {
    if (std::abs(r_lo - r_hi) <= opt.margin * std::max(1.0, r_hi))
      throw Error(ErrorCode::divergent_everywhere, "critical_exponent: rho(s) is constant >= 1 on the bracket; the series diverges for every s",
                  {lo, r_lo, hi, r_hi});
    throw Error(ErrorCode::invalid_bracket, "critical_exponent: rho(s_hi) >= 1; raise s_hi", {lo, r_lo, hi, r_hi});
  }
  if (r_lo <= 1.0 + opt.margin) throw Error(ErrorCode::invalid_bracket, "critical_exponent: rho(s_lo) <= 1; lower s_lo", {lo, r_lo, hi, r_hi});
  if (r_lo < r_hi) throw Error(ErrorCode::non_monotone, "critical_exponent: rho increases on the bracket", {lo, r_lo, hi, r_hi});
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double r = rho(mid).rho;
    ++est.iterations;
    if (r > r_lo * (1.0 + 1e-12) || r < r_hi * (1.0 - 1e-12))
      throw Error(ErrorCode::non_monotone, "critical_exponent: rho is not monotone in s", {lo, r_lo, mid, r, hi, r_hi});
    if (r > 1.0) {
      lo = mid;
      r_lo = r;
    } else {
      hi = mid;
      r_hi = r;
    }
  }
  est.lo = lo;
  est.hi = hi;
  est.delta = 0.5 * (lo + hi);
  const auto fit = rho(est.delta);
  est.rho_at_delta = fit.rho;
  est.r2_at_delta = fit.r2;
  return est;
}

inline DeltaEstimate critical_exponent(const Correspondence& c, const SpherePoint& x, double s_lo, double s_hi, double tol, int depth,
                                       const DeltaOptions& opt = {}) {
  return critical_exponent(level_weights(c, x, depth, opt.poincare), s_lo, s_hi, tol, opt);
}

}  // namespace holocorr
