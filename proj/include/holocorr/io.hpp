#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "holocorr/correspondence.hpp"
#include "holocorr/dimension.hpp"
#include "holocorr/error.hpp"
#include "holocorr/measure.hpp"
#include "holocorr/poincare.hpp"

namespace holocorr::io {

using nlohmann::json;

/// Parses `re`, `imi`, `re+imi` or `re-imi`.
inline std::optional<cplx> parse_complex(const std::string& text) {
  std::string t;
  for (char ch : text)
    if (ch != ' ') t += ch;
  if (t.empty()) return std::nullopt;
  auto number = [](const std::string& s) -> std::optional<double> {
    if (s.empty() || s == "+" || s == "-") return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  };
  if (t.back() != 'i') {
    auto v = number(t);
    if (!v) return std::nullopt;
    return cplx(*v, 0.0);
  }
  t.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = t.size(); k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_part = [&](const std::string& s) -> std::optional<double> {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return number(s);
  };
  if (split == std::string::npos) {
    auto im = imag_part(t);
    if (!im) return std::nullopt;
    return cplx(0.0, *im);
  }
  auto re = number(t.substr(0, split));
  auto im = imag_part(t.substr(split));
  if (!re || !im) return std::nullopt;
  return cplx(*re, *im);
}

/// Comma-separated complex list.
inline std::optional<std::vector<cplx>> parse_complex_list(const std::string& text) {
  std::vector<cplx> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    auto v = parse_complex(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!v) return std::nullopt;
    out.push_back(*v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::optional<SpherePoint> parse_point(const std::string& text) {
  if (text == "inf" || text == "infinity") return SpherePoint::infinity();
  auto v = parse_complex(text);
  if (!v) return std::nullopt;
  return SpherePoint(*v);
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const SpherePoint& p) {
  if (p.is_infinity()) return "inf";
  return to_json(p.value());
}

inline json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_string()) {
    if (auto v = parse_complex(j.get<std::string>())) return *v;
  }
  throw Error(ErrorCode::invalid_argument, "expected a complex number as [re, im], a number or a string");
}

inline SpherePoint point_from_json(const json& j) {
  if (j.is_string()) {
    if (auto p = parse_point(j.get<std::string>())) return *p;
    throw Error(ErrorCode::invalid_argument, "malformed point");
  }
  return SpherePoint(complex_from_json(j));
}

/// {"dz", "dw", "coeffs": rows indexed by z-degree, entries by w-degree}.
inline json to_json(const BiPoly& p) {
  json rows = json::array();
  for (int i = 0; i <= p.dz(); ++i) {
    json row = json::array();
    for (int j = 0; j <= p.dw(); ++j) row.push_back(to_json(p.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j))));
    rows.push_back(row);
  }
  return {{"dz", p.dz()}, {"dw", p.dw()}, {"coeffs", rows}};
}

inline BiPoly bipoly_from_json(const json& j) {
  if (!j.is_object() || !j.contains("coeffs") || !j["coeffs"].is_array())
    throw Error(ErrorCode::invalid_argument, "polynomial JSON needs a \"coeffs\" array of rows");
  std::vector<std::vector<cplx>> grid;
  std::size_t width = 0;
  for (const auto& row : j["coeffs"]) {
    if (!row.is_array()) throw Error(ErrorCode::invalid_argument, "polynomial rows must be arrays");
    std::vector<cplx> r;
    for (const auto& v : row) r.push_back(complex_from_json(v));
    width = std::max(width, r.size());
    grid.push_back(std::move(r));
  }
  for (auto& r : grid) r.resize(width, cplx{});
  BiPoly p(grid);
  if (j.contains("dz") && j["dz"].get<int>() != p.dz()) throw Error(ErrorCode::invalid_argument, "declared dz does not match coefficients");
  if (j.contains("dw") && j["dw"].get<int>() != p.dw()) throw Error(ErrorCode::invalid_argument, "declared dw does not match coefficients");
  return p;
}

inline json to_json(const Correspondence& c) {
  json j{{"kind", c.anti() ? "anti" : "holo"}, {"family", c.family()}, {"params", c.params()}, {"poly", to_json(c.poly())}};
  if (!c.removed_z().empty() || !c.removed_w().empty()) {
    json rz = json::array(), rw = json::array();
    for (auto v : c.removed_z()) rz.push_back(to_json(v));
    for (auto v : c.removed_w()) rw.push_back(to_json(v));
    j["removed_content"] = {{"z", rz}, {"w", rw}};
  }
  return j;
}

/// Accepts a full correspondence object or a bare polynomial (holomorphic).
inline Correspondence correspondence_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "correspondence JSON must be an object");
  Kind kind = Kind::holomorphic;
  if (j.contains("kind")) {
    const auto k = j["kind"].get<std::string>();
    if (k == "anti" || k == "antiholomorphic") {
      kind = Kind::antiholomorphic;
    } else if (k != "holo" && k != "holomorphic") {
      throw Error(ErrorCode::invalid_argument, "kind must be \"holo\" or \"anti\"");
    }
  }
  const json& pj = j.contains("poly") ? j["poly"] : j;
  return Correspondence(bipoly_from_json(pj), kind, j.value("family", std::string("custom")), j.value("params", json::object()));
}

inline json to_json(const AtomicMeasure& m) {
  json atoms = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& p = m.points[i];
    if (p.is_infinity()) {
      atoms.push_back(json::array({"inf", m.masses[i]}));
    } else {
      atoms.push_back(json::array({p.value().real(), p.value().imag(), m.masses[i]}));
    }
  }
  return {{"s", m.s}, {"depth", m.depth}, {"basepoint", to_json(m.basepoint)}, {"atoms", atoms}};
}

inline json to_json(const LevelSums& ls) {
  json a = json::array(), la = json::array();
  for (double v : ls.a) a.push_back(num(v));
  for (double v : ls.log_a) la.push_back(num(v));
  return {{"s", ls.s}, {"a", a}, {"log_a", la}};
}

inline json to_json(const DeltaEstimate& d) {
  return {{"delta", d.delta},
          {"bracket", json::array({d.lo, d.hi})},
          {"rho_at_delta", num(d.rho_at_delta)},
          {"fit_r2_at_delta", num(d.r2_at_delta)},
          {"depth", d.depth},
          {"iterations", d.iterations},
          {"estimator", "root of rho(s) = 1, rho from a log-linear fit of tail level sums"}};
}

inline void write_rho_csv(std::ostream& os, const DeltaEstimate& d) {
  os << "s,rho,r2\n";
  for (const auto& smp : d.samples) os << format_double(smp.s) << ',' << format_double(smp.rho) << ',' << format_double(smp.r2) << '\n';
}

inline json to_json(const DimensionEstimate& e) {
  json counts = json::array();
  for (auto v : e.counts) counts.push_back(v);
  return {{"dim", e.dim}, {"scales", e.scales}, {"counts", counts}, {"r2", e.r2}, {"degenerate", e.degenerate}};
}

inline void write_counts_csv(std::ostream& os, const DimensionEstimate& e) {
  os << "scale,count\n";
  for (std::size_t k = 0; k < e.scales.size(); ++k) os << format_double(e.scales[k]) << ',' << e.counts[k] << '\n';
}

inline json to_json(const HdDeltaReport& r) {
  return {{"hd_est", r.hd.dim},
          {"delta_est", r.delta.delta},
          {"slack", r.slack},
          {"inequality_ok", r.inequality_ok},
          {"delta_lt_2", r.delta_lt_2},
          {"cloud_size", r.cloud_size},
          {"dimension", to_json(r.hd)},
          {"delta", to_json(r.delta)},
          {"note", r.note}};
}

inline json to_json(const FixedPoint& f) {
  json j{{"point", to_json(f.point)},
         {"multiplicity", f.multiplicity},
         {"class", std::string(to_string(f.cls))},
         {"multiplier", to_json(f.multiplier)},
         {"multiplier_abs", num(f.multiplier_abs)}};
  if (f.rotation) j["rotation"] = json::array({f.rotation->first, f.rotation->second});
  return j;
}

inline json to_json(const ChordalDisk& d) { return {{"center", to_json(d.center)}, {"radius", d.radius}}; }

inline json to_json(const ConformalityReport& r) {
  return {{"region", to_json(r.region)},
          {"branch", {{"index", r.branch}, {"image_center", to_json(r.image_center)}, {"image_radius", r.image_radius}}},
          {"delta", r.delta},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"rel_residual", r.rel_residual},
          {"atoms_in_region", r.atoms_in_region},
          {"atoms_in_image", r.atoms_in_image},
          {"approximation", r.approximation}};
}

inline json to_json(const DiracReport& r) {
  json br = json::array();
  for (const auto& b : r.branches) br.push_back({{"image", to_json(b.image)}, {"derivative", num(b.derivative)}, {"fixes", b.fixes}});
  json pairs = json::array();
  for (const auto& p : r.avoiding_pairs) pairs.push_back(to_json(p));
  return {{"omega", to_json(r.omega)},
          {"delta", r.delta},
          {"branches", br},
          {"critical_branch_found", r.critical_branch_found},
          {"fixing_pair", {{"lhs", r.fixing_pair_lhs}, {"rhs", num(r.fixing_pair_rhs)}}},
          {"avoiding_pairs", pairs},
          {"attempts", r.attempts},
          {"seed", r.seed}};
}

inline json to_json(const ParabolicOrderResult& r) {
  return {{"p", r.p}, {"slope", r.slope}, {"fit_r2", r.r2}, {"seed_angle", r.seed_angle}, {"fit_constant", r.fit_constant},
          {"multiplier", to_json(r.multiplier)}};
}

}  // namespace holocorr::io
