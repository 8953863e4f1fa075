#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "holocorr/correspondence.hpp"
#include "holocorr/dimension.hpp"
#include "holocorr/error.hpp"
#include "holocorr/families.hpp"
#include "holocorr/io.hpp"
#include "holocorr/measure.hpp"
#include "holocorr/orbits.hpp"
#include "holocorr/parallel.hpp"
#include "holocorr/poincare.hpp"

namespace holocorr::cli {

using nlohmann::json;

struct RunConfig {
  std::string command;
  std::optional<Correspondence> corr;
  SpherePoint x;
  int depth = 0;
  int burn_in = 0;
  double grid_res = 1e-3;
  double s_lo = 0.5, s_hi = 2.0, tol = 1e-4, tail = 0.5;
  double s = 1.0, delta = 1.0, slack = 0.1;
  double scale_lo = -1.0, scale_hi = 0.1;
  int n_scales = 8;
  std::string out, pgm, rho_csv, cloud_csv, counts_csv;
  Window window;
  int width = 512, height = 512;
  unsigned threads = 1;
  std::uint64_t seed = 1;
  std::vector<ChordalDisk> disks;
  int branch = -1;
  std::optional<SpherePoint> omega;
  int trials = 10;
  double radius = 0.05;
};

struct FieldError {
  std::string field;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<FieldError> f) : std::runtime_error("invalid_config"), fields(std::move(f)) {}
  std::vector<FieldError> fields;
};

inline const std::vector<std::string>& option_names() {
  static const std::vector<std::string> names{"family", "p",        "q",        "a",         "poly",       "x",     "depth",  "burn-in",
                                              "grid-res", "s-lo",   "s-hi",     "tol",       "tail",       "s",     "delta",  "slack",
                                              "scale-lo", "scale-hi", "n-scales", "out",      "pgm",        "rho-csv", "cloud-csv", "counts-csv",
                                              "window",   "width",  "height",   "threads",   "seed",       "branch", "omega",  "trials",
                                              "radius"};
  return names;
}

inline const std::map<std::string, std::string>& option_help() {
  static const std::map<std::string, std::string> h{
      {"family", "rational-inverse, bullett-penrose or llmm"},
      {"p", "numerator coefficients, constant first (e.g. 0.25,0,1)"},
      {"q", "denominator coefficients (default 1)"},
      {"a", "Bullett-Penrose parameter"},
      {"poly", "inline correspondence JSON instead of a family"},
      {"x", "basepoint (re+imi or inf)"},
      {"depth", "orbit depth"},
      {"burn-in", "levels dropped from the limit-set cloud (default depth/3)"},
      {"grid-res", "cloud deduplication resolution (chordal)"},
      {"s-lo", "lower end of the exponent bracket"},
      {"s-hi", "upper end of the exponent bracket"},
      {"tol", "bisection tolerance on delta"},
      {"tail", "fraction of levels used in the growth fit"},
      {"s", "measure exponent"},
      {"delta", "conformality exponent"},
      {"slack", "allowed hd - delta excess"},
      {"scale-lo", "smallest box size (default 4*grid-res)"},
      {"scale-hi", "largest box size"},
      {"n-scales", "number of box sizes"},
      {"out", "JSON output file (default stdout)"},
      {"pgm", "rendered cloud as binary PGM"},
      {"rho-csv", "(s, rho) samples CSV"},
      {"cloud-csv", "limit-set cloud CSV"},
      {"counts-csv", "box counts CSV"},
      {"window", "render window xmin,xmax,ymin,ymax"},
      {"width", "raster width"},
      {"height", "raster height"},
      {"threads", "worker threads; output does not depend on it"},
      {"seed", "RNG seed"},
      {"branch", "branch index, -1 for all"},
      {"omega", "parabolic point (measure: mass near it; conformality: Dirac check)"},
      {"trials", "random pairs tried in the Dirac check"},
      {"radius", "chordal ball radius around omega"}};
  return h;
}

inline const std::map<std::string, int>& default_depths() {
  static const std::map<std::string, int> d{{"limitset", 30}, {"delta", 18}, {"measure", 12}, {"conformality", 12}, {"report", 20},
                                            {"fixedpoints", 0}};
  return d;
}

/// Typed access to raw option values with error collection.
class Fields {
 public:
  Fields(std::map<std::string, json> raw, std::vector<FieldError>& errors) : raw_(std::move(raw)), errors_(errors) {}

  bool has(const std::string& k) const { return raw_.count(k) > 0; }
  const json& raw(const std::string& k) const { return raw_.at(k); }
  void fail(const std::string& k, const std::string& msg) { errors_.push_back({k, msg}); }

  std::optional<double> real(const std::string& k) {
    if (!has(k)) return std::nullopt;
    const json& v = raw_.at(k);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      char* end = nullptr;
      const double d = std::strtod(s.c_str(), &end);
      if (!s.empty() && end == s.c_str() + s.size() && std::isfinite(d)) return d;
    }
    fail(k, "expected a real number");
    return std::nullopt;
  }

  std::optional<long long> integer(const std::string& k) {
    if (!has(k)) return std::nullopt;
    const json& v = raw_.at(k);
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      char* end = nullptr;
      const long long d = std::strtoll(s.c_str(), &end, 10);
      if (!s.empty() && end == s.c_str() + s.size()) return d;
    }
    fail(k, "expected an integer");
    return std::nullopt;
  }

  std::optional<std::string> text(const std::string& k) {
    if (!has(k)) return std::nullopt;
    const json& v = raw_.at(k);
    if (v.is_string()) return v.get<std::string>();
    fail(k, "expected a string");
    return std::nullopt;
  }

  std::optional<cplx> complex(const std::string& k) {
    if (!has(k)) return std::nullopt;
    try {
      return io::complex_from_json(raw_.at(k));
    } catch (const std::exception&) {
      fail(k, "expected a complex number (re, re+imi or [re, im])");
      return std::nullopt;
    }
  }

  std::optional<SpherePoint> point(const std::string& k) {
    if (!has(k)) return std::nullopt;
    try {
      return io::point_from_json(raw_.at(k));
    } catch (const std::exception&) {
      fail(k, "expected a point: re, re+imi, [re, im] or inf");
      return std::nullopt;
    }
  }

  std::optional<std::vector<cplx>> complex_list(const std::string& k) {
    if (!has(k)) return std::nullopt;
    const json& v = raw_.at(k);
    if (v.is_string()) {
      if (auto l = io::parse_complex_list(v.get<std::string>())) return l;
    } else if (v.is_array()) {
      try {
        std::vector<cplx> out;
        for (const auto& e : v) out.push_back(io::complex_from_json(e));
        return out;
      } catch (const std::exception&) {
      }
    }
    fail(k, "expected an ascending comma-separated coefficient list");
    return std::nullopt;
  }

 private:
  std::map<std::string, json> raw_;
  std::vector<FieldError>& errors_;
};

namespace detail {

inline std::optional<ChordalDisk> parse_disk(const json& v) {
  try {
    if (v.is_object()) return ChordalDisk{io::point_from_json(v.at("center")), v.at("radius").get<double>()};
    if (v.is_array() && v.size() == 3) return ChordalDisk{SpherePoint(cplx(v[0].get<double>(), v[1].get<double>())), v[2].get<double>()};
    if (v.is_array() && v.size() == 2) return ChordalDisk{io::point_from_json(v[0]), v[1].get<double>()};
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      const auto last = s.rfind(',');
      if (last == std::string::npos) return std::nullopt;
      auto head = s.substr(0, last);
      std::optional<SpherePoint> c;
      const auto first = head.find(',');
      if (first != std::string::npos) {
        auto re = io::parse_complex(head.substr(0, first));
        auto im = io::parse_complex(head.substr(first + 1));
        if (re && im && re->imag() == 0.0 && im->imag() == 0.0) c = SpherePoint(cplx(re->real(), im->real()));
      } else {
        c = io::parse_point(head);
      }
      char* end = nullptr;
      const auto rs = s.substr(last + 1);
      const double r = std::strtod(rs.c_str(), &end);
      if (!c || rs.empty() || end != rs.c_str() + rs.size()) return std::nullopt;
      return ChordalDisk{*c, r};
    }
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

inline void build_correspondence(Fields& f, RunConfig& cfg) {
  const bool has_family = f.has("family"), has_poly = f.has("poly");
  if (has_family && has_poly) {
    f.fail("poly", "give either a family or an inline polynomial, not both");
    return;
  }
  if (!has_family && !has_poly) {
    f.fail("family", "a correspondence is required (--family or --poly)");
    return;
  }
  if (has_poly) {
    json pj = f.raw("poly");
    if (pj.is_string()) {
      try {
        pj = json::parse(pj.get<std::string>());
      } catch (const std::exception& e) {
        f.fail("poly", std::string("malformed JSON: ") + e.what());
        return;
      }
    }
    try {
      cfg.corr = io::correspondence_from_json(pj);
    } catch (const Error& e) {
      f.fail("poly", std::string(to_string(e.code())) + ": " + e.what());
    }
    return;
  }
  const auto family = f.text("family");
  if (!family) return;
  try {
    if (*family == "rational-inverse" || *family == "llmm") {
      auto p = f.complex_list("p");
      auto q = f.has("q") ? f.complex_list("q") : std::optional<std::vector<cplx>>(std::vector<cplx>{1.0});
      if (!f.has("p")) f.fail("p", "required for family " + *family);
      if (!p || !q) return;
      cfg.corr = *family == "llmm" ? llmm(UniPoly(*p), UniPoly(*q)) : from_rational_inverse(UniPoly(*p), UniPoly(*q));
    } else if (*family == "bullett-penrose") {
      auto a = f.complex("a");
      if (!f.has("a")) f.fail("a", "required for family bullett-penrose");
      if (!a) return;
      cfg.corr = bullett_penrose(*a);
    } else {
      f.fail("family", "unknown family '" + *family + "' (rational-inverse, bullett-penrose, llmm)");
    }
  } catch (const Error& e) {
    f.fail("family", std::string(to_string(e.code())) + ": " + e.what());
  }
}

}  // namespace detail

/// Validates raw option values for a command; throws ConfigError listing
/// every violated field.
inline RunConfig validate(const std::string& command, std::map<std::string, json> raw) {
  std::vector<FieldError> errors;
  Fields f(std::move(raw), errors);
  RunConfig cfg;
  cfg.command = command;
  detail::build_correspondence(f, cfg);

  const bool needs_x = command != "fixedpoints";
  if (auto x = f.point("x")) {
    cfg.x = *x;
  } else if (needs_x && !f.has("x")) {
    f.fail("x", "basepoint required");
  }

  cfg.depth = default_depths().at(command);
  if (auto d = f.integer("depth")) {
    if (*d < 0 || *d > 64) {
      f.fail("depth", "must lie in [0, 64]");
    } else {
      cfg.depth = static_cast<int>(*d);
    }
  }
  cfg.burn_in = cfg.depth / 3;
  if (auto b = f.integer("burn-in")) {
    if (*b < 0) f.fail("burn-in", "must be >= 0");
    cfg.burn_in = static_cast<int>(*b);
  }
  if ((command == "limitset" || command == "report") && cfg.burn_in >= cfg.depth) f.fail("burn-in", "must be smaller than depth");

  auto positive = [&](const std::string& k, double& target, double upper = std::numeric_limits<double>::infinity()) {
    if (auto v = f.real(k)) {
      if (!(*v > 0.0 && *v <= upper)) {
        f.fail(k, upper < std::numeric_limits<double>::infinity() ? "must lie in (0, " + format_double(upper) + "]" : "must be positive");
      } else {
        target = *v;
      }
    }
  };
  positive("grid-res", cfg.grid_res, 1.0);
  positive("s-lo", cfg.s_lo);
  positive("s-hi", cfg.s_hi);
  if (cfg.s_hi <= cfg.s_lo) f.fail("s-hi", "must exceed s-lo");
  positive("tol", cfg.tol);
  positive("tail", cfg.tail, 1.0);
  const bool has_s = f.has("s");
  positive("s", cfg.s);
  if ((command == "measure" || command == "conformality") && !has_s) f.fail("s", "measure exponent required");
  cfg.delta = cfg.s;
  positive("delta", cfg.delta);
  if (auto v = f.real("slack")) {
    if (*v < 0) {
      f.fail("slack", "must be >= 0");
    } else {
      cfg.slack = *v;
    }
  }
  positive("scale-lo", cfg.scale_lo);
  positive("scale-hi", cfg.scale_hi, 2.0);
  if (cfg.scale_lo > 0 && cfg.scale_lo >= cfg.scale_hi) f.fail("scale-lo", "must be smaller than scale-hi");
  if (cfg.scale_lo > 0 && cfg.scale_lo < 2.0 * cfg.grid_res) f.fail("scale-lo", "must be at least twice grid-res");
  if (auto n = f.integer("n-scales")) {
    if (*n < 2 || *n > 64) {
      f.fail("n-scales", "must lie in [2, 64]");
    } else {
      cfg.n_scales = static_cast<int>(*n);
    }
  }
  for (const char* k : {"out", "pgm", "rho-csv", "cloud-csv", "counts-csv"}) {
    if (auto t = f.text(k)) {
      if (t->empty()) f.fail(k, "empty path");
      std::string& dst = std::string(k) == "out" ? cfg.out : std::string(k) == "pgm" ? cfg.pgm : std::string(k) == "rho-csv" ? cfg.rho_csv
                         : std::string(k) == "cloud-csv"                              ? cfg.cloud_csv
                                                                                      : cfg.counts_csv;
      dst = *t;
    }
  }
  if (f.has("window")) {
    std::vector<double> w;
    const json& v = f.raw("window");
    if (v.is_array()) {
      for (const auto& e : v)
        if (e.is_number()) w.push_back(e.get<double>());
    } else if (v.is_string()) {
      if (auto l = io::parse_complex_list(v.get<std::string>()))
        for (auto c : *l)
          if (c.imag() == 0.0) w.push_back(c.real());
    }
    if (w.size() != 4 || !(w[1] > w[0]) || !(w[3] > w[2])) {
      f.fail("window", "expected xmin,xmax,ymin,ymax with xmin < xmax and ymin < ymax");
    } else {
      cfg.window = {w[0], w[1], w[2], w[3]};
    }
  }
  for (const char* k : {"width", "height"}) {
    if (auto v = f.integer(k)) {
      if (*v < 1 || *v > 16384) {
        f.fail(k, "must lie in [1, 16384]");
      } else {
        (std::string(k) == "width" ? cfg.width : cfg.height) = static_cast<int>(*v);
      }
    }
  }
  cfg.threads = default_thread_count();
  if (auto v = f.integer("threads")) {
    if (*v < 1 || *v > 256) {
      f.fail("threads", "must lie in [1, 256]");
    } else {
      cfg.threads = static_cast<unsigned>(*v);
    }
  }
  if (auto v = f.integer("seed")) {
    if (*v < 0) {
      f.fail("seed", "must be >= 0");
    } else {
      cfg.seed = static_cast<std::uint64_t>(*v);
    }
  }
  if (f.has("disk")) {
    const json& v = f.raw("disk");
    const json list = v.is_array() && !v.empty() && (v[0].is_array() || v[0].is_object() || v[0].is_string()) ? v : json::array({v});
    for (const auto& e : list) {
      auto d = detail::parse_disk(e);
      if (!d || !(d->radius > 0.0 && d->radius < 2.0)) {
        f.fail("disk", "expected re,im,radius (or inf,radius) with chordal radius in (0, 2)");
      } else {
        cfg.disks.push_back(*d);
      }
    }
  }
  if (command == "conformality" && cfg.disks.empty() && !f.has("disk")) f.fail("disk", "at least one test disk required");
  if (auto v = f.integer("branch")) {
    if (*v < -1) {
      f.fail("branch", "must be -1 (all) or a branch index");
    } else {
      cfg.branch = static_cast<int>(*v);
    }
  }
  cfg.omega = f.point("omega");
  if (auto v = f.integer("trials")) {
    if (*v < 0 || *v > 10000) {
      f.fail("trials", "must lie in [0, 10000]");
    } else {
      cfg.trials = static_cast<int>(*v);
    }
  }
  if (auto v = f.real("radius")) {
    if (*v < 0) {
      f.fail("radius", "must be >= 0");
    } else {
      cfg.radius = *v;
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

namespace detail {

inline std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw Error(ErrorCode::invalid_argument, "cannot open output file " + path);
  return os;
}

inline json metadata(const RunConfig& cfg) {
  return {{"command", cfg.command}, {"correspondence", io::to_json(*cfg.corr)}, {"seed", cfg.seed}};
}

inline void emit(const RunConfig& cfg, const json& j, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (cfg.out.empty()) {
    out << text;
  } else {
    auto os = open_out(cfg.out);
    os << text;
  }
}

inline void write_cloud_outputs(const RunConfig& cfg, const PointCloud& cloud) {
  if (!cfg.cloud_csv.empty()) {
    auto os = open_out(cfg.cloud_csv);
    write_cloud_csv(os, cloud);
  }
  if (!cfg.pgm.empty()) {
    auto os = open_out(cfg.pgm, true);
    write_pgm(os, render(cloud, cfg.window, cfg.width, cfg.height));
  }
}

}  // namespace detail

inline void cmd_limitset(const RunConfig& cfg, std::ostream& out) {
  const auto cloud = limit_set(*cfg.corr, cfg.x, cfg.depth, cfg.burn_in, cfg.grid_res, cfg.threads);
  if (cfg.cloud_csv.empty()) write_cloud_csv(out, cloud);
  detail::write_cloud_outputs(cfg, cloud);
}

inline void cmd_delta(const RunConfig& cfg, std::ostream& out) {
  DeltaOptions opt;
  opt.tail_fraction = cfg.tail;
  opt.poincare.threads = cfg.threads;
  const auto est = critical_exponent(*cfg.corr, cfg.x, cfg.s_lo, cfg.s_hi, cfg.tol, cfg.depth, opt);
  json j = detail::metadata(cfg);
  j["basepoint"] = io::to_json(cfg.x);
  j["estimate"] = io::to_json(est);
  detail::emit(cfg, j, out);
  if (!cfg.rho_csv.empty()) {
    auto os = detail::open_out(cfg.rho_csv);
    io::write_rho_csv(os, est);
  }
}

inline void cmd_measure(const RunConfig& cfg, std::ostream& out) {
  MeasureOptions opt;
  opt.threads = cfg.threads;
  const auto m = patterson_sullivan(*cfg.corr, cfg.x, cfg.s, cfg.depth, opt);
  json j = io::to_json(m);
  j["meta"] = detail::metadata(cfg);
  if (cfg.omega) j["parabolic_mass"] = {{"omega", io::to_json(*cfg.omega)}, {"radius", cfg.radius}, {"mass", parabolic_mass(m, *cfg.omega, cfg.radius, cfg.threads)}};
  detail::emit(cfg, j, out);
}

inline void cmd_conformality(const RunConfig& cfg, std::ostream& out) {
  MeasureOptions opt;
  opt.threads = cfg.threads;
  const auto m = patterson_sullivan(*cfg.corr, cfg.x, cfg.s, cfg.depth, opt);
  json reports = json::array(), skipped = json::array();
  const double d[1] = {cfg.delta};
  for (const auto& disk : cfg.disks) {
    std::vector<int> branches;
    if (cfg.branch >= 0) {
      branches.push_back(cfg.branch);
    } else {
      for (int b = 0; b < cfg.corr->dw(); ++b) branches.push_back(b);
    }
    for (int b : branches) {
      try {
        for (const auto& r : conformality_residuals(m, *cfg.corr, disk, b, d, cfg.threads)) reports.push_back(io::to_json(r));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::no_valid_branch && e.code() != ErrorCode::invalid_argument) throw;
        skipped.push_back({{"region", io::to_json(disk)}, {"branch", b}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}});
      }
    }
  }
  json j = detail::metadata(cfg);
  j["basepoint"] = io::to_json(cfg.x);
  j["s"] = cfg.s;
  j["depth"] = cfg.depth;
  j["delta"] = cfg.delta;
  j["reports"] = reports;
  j["skipped"] = skipped;
  if (cfg.omega) j["dirac"] = io::to_json(dirac_conformality_check(*cfg.corr, *cfg.omega, cfg.delta, cfg.trials, cfg.seed));
  detail::emit(cfg, j, out);
}

inline void cmd_report(const RunConfig& cfg, std::ostream& out) {
  ReportConfig rc;
  rc.depth = cfg.depth;
  rc.burn_in = cfg.burn_in;
  rc.grid_res = cfg.grid_res;
  rc.s_lo = cfg.s_lo;
  rc.s_hi = cfg.s_hi;
  rc.tol = cfg.tol;
  rc.tail_fraction = cfg.tail;
  rc.scale_lo = cfg.scale_lo;
  rc.scale_hi = cfg.scale_hi;
  rc.n_scales = cfg.n_scales;
  rc.slack = cfg.slack;
  rc.threads = cfg.threads;
  PointCloud cloud;
  const auto rep = hd_delta_report(*cfg.corr, cfg.x, rc, &cloud);
  json j = detail::metadata(cfg);
  j["basepoint"] = io::to_json(cfg.x);
  j["depth"] = cfg.depth;
  j["burn_in"] = cfg.burn_in;
  j["grid_res"] = cfg.grid_res;
  j["report"] = io::to_json(rep);
  detail::emit(cfg, j, out);
  detail::write_cloud_outputs(cfg, cloud);
  if (!cfg.rho_csv.empty()) {
    auto os = detail::open_out(cfg.rho_csv);
    io::write_rho_csv(os, rep.delta);
  }
  if (!cfg.counts_csv.empty()) {
    auto os = detail::open_out(cfg.counts_csv);
    io::write_counts_csv(os, rep.hd);
  }
}

inline void cmd_fixedpoints(const RunConfig& cfg, std::ostream& out) {
  const auto& c = *cfg.corr;
  json fps = json::array();
  for (const auto& fp : c.fixed_points()) {
    json e = io::to_json(fp);
    if (fp.cls == FixedClass::indifferent) {
      try {
        e["petal"] = io::to_json(parabolic_order(c, fp.point));
      } catch (const Error& err) {
        e["petal_error"] = std::string(to_string(err.code()));
      }
    }
    fps.push_back(e);
  }
  auto points = [&](const std::function<std::vector<SpherePoint>()>& fn) -> json {
    try {
      json a = json::array();
      for (const auto& p : fn()) a.push_back(io::to_json(p));
      return a;
    } catch (const Error& e) {
      return {{"error", std::string(to_string(e.code()))}};
    }
  };
  json j = detail::metadata(cfg);
  j["fixed_points"] = fps;
  j["critical_values_forward"] = points([&] { return c.critical_values_forward(); });
  j["critical_values_backward"] = points([&] { return c.critical_values_backward(); });
  j["singular_points"] = points([&] { return c.singular_points(); });
  detail::emit(cfg, j, out);
}

inline json error_json(const std::vector<FieldError>& fields) {
  json arr = json::array();
  for (const auto& fe : fields) arr.push_back({{"field", fe.field}, {"message", fe.message}});
  return {{"error", "invalid_config"}, {"fields", arr}};
}

/// Full command-line entry point. Exit codes: 0 success, 1 runtime error,
/// 2 invalid configuration. Errors are written to err as JSON.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical engine for (anti)holomorphic correspondences P(z, w) = 0", "holocorr"};
  app.require_subcommand(1);
  std::map<std::string, std::string> flag_values;
  std::vector<std::string> disk_values;
  std::string config_path;
  const std::map<std::string, std::string> help{
      {"limitset", "Forward limit set as a cloud CSV (and optional PGM)"},
      {"delta", "Critical exponent estimate (JSON) and (s, rho) CSV"},
      {"measure", "Atomic Patterson-Sullivan measure (JSON)"},
      {"conformality", "Conformality residuals on test disks (JSON)"},
      {"report", "Box dimension vs critical exponent report (JSON)"},
      {"fixedpoints", "Classified fixed points (JSON)"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, desc] : help) {
    auto* sub = app.add_subcommand(name, desc);
    for (const auto& opt : option_names()) sub->add_option("--" + opt, flag_values[name + "/" + opt], option_help().at(opt));
    sub->add_option("--disk", disk_values, "Test disk re,im,radius (repeatable)");
    sub->add_option("--config", config_path, "JSON file whose keys override flags");
    subs[name] = sub;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << error_json({{"command-line", e.what()}}).dump() << "\n";
    return 2;
  }
  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;
  std::map<std::string, json> raw;
  for (const auto& opt : option_names()) {
    if (subs[command]->get_option("--" + opt)->count() > 0) raw[opt] = flag_values[command + "/" + opt];
  }
  if (!disk_values.empty()) {
    json d = json::array();
    for (const auto& v : disk_values) d.push_back(v);
    raw["disk"] = d;
  }
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    json cj;
    try {
      if (!is) throw std::runtime_error("cannot open file");
      cj = json::parse(is);
      if (!cj.is_object()) throw std::runtime_error("top level must be an object");
    } catch (const std::exception& e) {
      err << error_json({{"config", e.what()}}).dump() << "\n";
      return 2;
    }
    for (auto it = cj.begin(); it != cj.end(); ++it) {
      std::string key = it.key();
      std::replace(key.begin(), key.end(), '_', '-');
      if (key == "disks") key = "disk";
      raw[key] = it.value();
    }
  }
  try {
    const RunConfig cfg = validate(command, raw);
    if (command == "limitset") cmd_limitset(cfg, out);
    if (command == "delta") cmd_delta(cfg, out);
    if (command == "measure") cmd_measure(cfg, out);
    if (command == "conformality") cmd_conformality(cfg, out);
    if (command == "report") cmd_report(cfg, out);
    if (command == "fixedpoints") cmd_fixedpoints(cfg, out);
  } catch (const ConfigError& e) {
    err << error_json(e.fields).dump() << "\n";
    return 2;
  } catch (const Error& e) {
    json data = json::array();
    for (double v : e.data()) data.push_back(io::num(v));
    err << json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}, {"data", data}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace holocorr::cli
