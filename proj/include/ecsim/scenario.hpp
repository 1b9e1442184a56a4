#pragma once

// Declarative scenarios: INI configuration, time-series runs, and sweeps.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "ecsim/cat_dynamics.hpp"
#include "ecsim/propagator.hpp"
#include "ecsim/qubit_witness.hpp"
#include "ecsim/types.hpp"

namespace ecsim {

inline constexpr const char* kVersion = "0.1.0";

enum class WitnessSelection { ghz, w, both };
enum class OutputFormat { csv, json };

struct ScenarioConfig {
  SystemParams params;
  CatStateSpec cat;
  WitnessSelection witness_kind = WitnessSelection::ghz;
  bool dissipative = false;
  CoherenceModel coherence_model = CoherenceModel::dilation_consistent;
  double t_start = 0.0;
  double t_end = 3.0;
  int n_points = 20001;
  bool refine_optimum = true;
  std::string output_path;
  OutputFormat output_format = OutputFormat::csv;
  // Doubles the window until at least three revival minima are bracketed.
  bool auto_extend = false;

  void validate() const {
    params.validate();
    auto finite = [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    if (!finite(cat.alpha1)) throw ConfigError("cat.alpha1: must be finite");
    if (!finite(cat.alpha2)) throw ConfigError("cat.alpha2: must be finite");
    if (!std::isfinite(cat.theta)) throw ConfigError("cat.theta: must be finite");
    if (!std::isfinite(t_start) || t_start < 0.0) throw ConfigError("run.t_start: must be finite and >= 0");
    if (!std::isfinite(t_end) || !(t_start < t_end)) throw ConfigError("run.t_end: must exceed run.t_start");
    if (n_points < 2) throw ConfigError("run.n_points: must be >= 2");
    normalization(cat);
  }
};

// ---------------------------------------------------------------------------
// Text conversions

inline std::string format_double(double x, int digits = 17) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

inline std::string format_complex(Complex z) {
  if (z.imag() == 0.0) return format_double(z.real());
  std::string out = format_double(z.real());
  if (!std::signbit(z.imag())) out += '+';
  return out + format_double(z.imag()) + "i";
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::optional<double> parse_real(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

inline double parse_double_field(const std::string& field, std::string_view text) {
  const auto v = detail::parse_real(detail::trim(text));
  if (!v) throw ConfigError(field + ": expected a number, got '" + std::string(text) + "'");
  return *v;
}

/// Accepts "x", "yi", "x+yi", "x-yi" (also with j); "pi" multiples are not supported.
inline Complex parse_complex_field(const std::string& field, std::string_view text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  const auto fail = [&]() -> Complex {
    throw ConfigError(field + ": expected a complex number like 0.5-0.2i, got '" + std::string(text) + "'");
  };
  if (s.empty()) return fail();
  if (s.back() != 'i' && s.back() != 'j') {
    const auto v = detail::parse_real(s);
    return v ? Complex(*v, 0.0) : fail();
  }
  s.pop_back();
  // split at the last sign that is not the leading one or an exponent sign
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  const std::string re_text = split == std::string::npos ? "" : s.substr(0, split);
  std::string im_text = split == std::string::npos ? s : s.substr(split);
  if (im_text.empty() || im_text == "+" || im_text == "-") im_text += "1";
  const auto im = detail::parse_real(im_text);
  if (!im) return fail();
  if (re_text.empty()) return {0.0, *im};
  const auto re = detail::parse_real(re_text);
  return re ? Complex(*re, *im) : fail();
}

inline bool parse_bool_field(const std::string& field, std::string_view text) {
  std::string s = detail::trim(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(field + ": expected true or false, got '" + std::string(text) + "'");
}

inline const char* to_string(WitnessSelection k) {
  switch (k) {
    case WitnessSelection::ghz: return "ghz";
    case WitnessSelection::w: return "w";
    default: return "both";
  }
}

inline const char* to_string(CoherenceModel m) {
  return m == CoherenceModel::cavity_only ? "cavity_only" : "dilation_consistent";
}

inline const char* to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

inline WitnessSelection parse_witness_kind(const std::string& field, const std::string& text) {
  const std::string s = detail::trim(text);
  if (s == "ghz") return WitnessSelection::ghz;
  if (s == "w") return WitnessSelection::w;
  if (s == "both") return WitnessSelection::both;
  throw ConfigError(field + ": expected ghz, w or both, got '" + text + "'");
}

inline CoherenceModel parse_coherence_model(const std::string& field, const std::string& text) {
  const std::string s = detail::trim(text);
  if (s == "dilation_consistent") return CoherenceModel::dilation_consistent;
  if (s == "cavity_only" || s == "paper_literal") return CoherenceModel::cavity_only;
  throw ConfigError(field + ": expected dilation_consistent or cavity_only, got '" + text + "'");
}

inline OutputFormat parse_output_format(const std::string& field, const std::string& text) {
  const std::string s = detail::trim(text);
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError(field + ": expected csv or json, got '" + text + "'");
}

// ---------------------------------------------------------------------------
// INI configuration

/// Parses [params], [cat] and [run]; unknown sections or keys are errors.
inline ScenarioConfig parse_config(std::istream& in, const std::string& source = "<config>") {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ScenarioConfig cfg;
  for (const auto& [section, body] : tree) {
    if (section != "params" && section != "cat" && section != "run")
      throw ConfigError(source + ": unknown section [" + section + "]");
    if (body.empty() && !body.data().empty())
      throw ConfigError(source + ": key '" + section + "' outside of a section");
    for (const auto& [key, node] : body) {
      const std::string field = section + "." + key;
      const std::string& v = node.data();
      if (section == "params") {
        if (key == "omega_c") cfg.params.omega_c = parse_double_field(field, v);
        else if (key == "delta") cfg.params.delta = parse_double_field(field, v);
        else if (key == "g") cfg.params.g = parse_double_field(field, v);
        else if (key == "c_hop") cfg.params.c_hop = parse_double_field(field, v);
        else if (key == "gamma_c") cfg.params.gamma_c = parse_double_field(field, v);
        else if (key == "gamma_e") cfg.params.gamma_e = parse_double_field(field, v);
        else throw ConfigError(source + ": unknown field " + field);
      } else if (section == "cat") {
        if (key == "alpha1") cfg.cat.alpha1 = parse_complex_field(field, v);
        else if (key == "alpha2") cfg.cat.alpha2 = parse_complex_field(field, v);
        else if (key == "theta") cfg.cat.theta = parse_double_field(field, v);
        else throw ConfigError(source + ": unknown field " + field);
      } else {
        if (key == "witness_kind") cfg.witness_kind = parse_witness_kind(field, v);
        else if (key == "dissipative") cfg.dissipative = parse_bool_field(field, v);
        else if (key == "coherence_model") cfg.coherence_model = parse_coherence_model(field, v);
        else if (key == "t_start") cfg.t_start = parse_double_field(field, v);
        else if (key == "t_end") cfg.t_end = parse_double_field(field, v);
        else if (key == "n_points") {
          const double n = parse_double_field(field, v);
          if (n != std::floor(n) || n < 0 || n > 1e9) throw ConfigError(field + ": expected a non-negative integer");
          cfg.n_points = static_cast<int>(n);
        } else if (key == "refine_optimum") cfg.refine_optimum = parse_bool_field(field, v);
        else if (key == "output_path") cfg.output_path = detail::trim(v);
        else if (key == "output_format") cfg.output_format = parse_output_format(field, v);
        else if (key == "auto_extend") cfg.auto_extend = parse_bool_field(field, v);
        else throw ConfigError(source + ": unknown field " + field);
      }
    }
  }
  return cfg;
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

/// The fully resolved configuration as INI text; parse_config reads it back exactly.
inline std::string config_to_ini(const ScenarioConfig& cfg) {
  std::ostringstream o;
  o << "[params]\n"
    << "omega_c = " << format_double(cfg.params.omega_c) << "\n"
    << "delta = " << format_double(cfg.params.delta) << "\n"
    << "g = " << format_double(cfg.params.g) << "\n"
    << "c_hop = " << format_double(cfg.params.c_hop) << "\n"
    << "gamma_c = " << format_double(cfg.params.gamma_c) << "\n"
    << "gamma_e = " << format_double(cfg.params.gamma_e) << "\n"
    << "[cat]\n"
    << "alpha1 = " << format_complex(cfg.cat.alpha1) << "\n"
    << "alpha2 = " << format_complex(cfg.cat.alpha2) << "\n"
    << "theta = " << format_double(cfg.cat.theta) << "\n"
    << "[run]\n"
    << "witness_kind = " << to_string(cfg.witness_kind) << "\n"
    << "dissipative = " << (cfg.dissipative ? "true" : "false") << "\n"
    << "coherence_model = " << to_string(cfg.coherence_model) << "\n"
    << "t_start = " << format_double(cfg.t_start) << "\n"
    << "t_end = " << format_double(cfg.t_end) << "\n"
    << "n_points = " << cfg.n_points << "\n"
    << "refine_optimum = " << (cfg.refine_optimum ? "true" : "false") << "\n"
    << "output_path = " << cfg.output_path << "\n"
    << "output_format = " << to_string(cfg.output_format) << "\n"
    << "auto_extend = " << (cfg.auto_extend ? "true" : "false") << "\n";
  return o.str();
}

inline nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["params"] = {{"omega_c", cfg.params.omega_c}, {"delta", cfg.params.delta},     {"g", cfg.params.g},
                 {"c_hop", cfg.params.c_hop},     {"gamma_c", cfg.params.gamma_c}, {"gamma_e", cfg.params.gamma_e}};
  j["cat"] = {{"alpha1", format_complex(cfg.cat.alpha1)},
              {"alpha2", format_complex(cfg.cat.alpha2)},
              {"theta", cfg.cat.theta}};
  j["run"] = {{"witness_kind", to_string(cfg.witness_kind)},
              {"dissipative", cfg.dissipative},
              {"coherence_model", to_string(cfg.coherence_model)},
              {"t_start", cfg.t_start},
              {"t_end", cfg.t_end},
              {"n_points", cfg.n_points},
              {"refine_optimum", cfg.refine_optimum},
              {"output_path", cfg.output_path},
              {"output_format", to_string(cfg.output_format)},
              {"auto_extend", cfg.auto_extend}};
  return j;
}

// ---------------------------------------------------------------------------
// Presets

inline std::filesystem::path preset_directory() {
  if (const char* env = std::getenv("ECSIM_PRESET_DIR")) return env;
#ifdef ECSIM_PRESET_DIR
  return ECSIM_PRESET_DIR;
#else
  return "presets";
#endif
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig02", "fig03", "fig04", "fig05", "fig06", "fig07",
                                                 "fig08", "fig09", "fig10", "fig11", "fig12", "fig13"};
  return names;
}

inline ScenarioConfig load_preset(const std::string& name) {
  if (std::find(preset_names().begin(), preset_names().end(), name) == preset_names().end())
    throw ConfigError("unknown preset '" + name + "' (expected fig02 .. fig13)");
  return load_config(preset_directory() / (name + ".ini"));
}

// ---------------------------------------------------------------------------
// Running

inline constexpr int kMinRevivals = 3;
inline constexpr int kMaxDoublings = 10;

struct KindSummary {
  WitnessKind kind = WitnessKind::ghz;
  double t_star = 0.0;
  double witness_min = 0.0;
  std::vector<WindowMinimum> revivals;
};

struct RunReport {
  ScenarioConfig config;  // resolved: t_end reflects any auto extension
  double t_star = 0.0;
  double witness_min = 0.0;
  double max_photon_number = 0.0;
  std::vector<KindSummary> kinds;
  std::size_t scan_points = 0;
  int doublings = 0;
  std::string tool_version = kVersion;
  std::string timestamp;
};

inline std::vector<WitnessKind> selected_kinds(WitnessSelection s) {
  switch (s) {
    case WitnessSelection::ghz: return {WitnessKind::ghz};
    case WitnessSelection::w: return {WitnessKind::w};
    default: return {WitnessKind::ghz, WitnessKind::w};
  }
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

inline WitnessScenario make_scenario(const ScenarioConfig& cfg, WitnessKind kind) {
  return WitnessScenario{cfg.params, cfg.cat, kind, cfg.dissipative ? Dynamics::dissipative : Dynamics::closed,
                         cfg.coherence_model};
}

}  // namespace detail

/// Evaluates the scenario and fills the report (no file output).
inline RunReport analyze_scenario(const ScenarioConfig& config) {
  config.validate();
  RunReport report;
  report.config = config;
  const double step = dense_step(config.params);
  const double window = 2.0 * kPi / fastest_frequency(config.params);
  const double radius = revival_radius(config.params);
  const auto kinds = selected_kinds(config.witness_kind);

  std::vector<DenseScan> scans;
  for (WitnessKind k : kinds)
    scans.push_back(dense_scan(detail::make_scenario(config, k), config.t_start, config.t_end, step, window));

  auto enough_revivals = [&] {
    for (const auto& s : scans)
      if (revival_minima(s.windows, config.t_start, report.config.t_end, radius).size() <
          static_cast<std::size_t>(kMinRevivals))
        return false;
    return true;
  };
  if (config.auto_extend) {
    while (!enough_revivals() && report.doublings < kMaxDoublings) {
      const double span = report.config.t_end - config.t_start;
      const double new_end = report.config.t_end + span;
      for (std::size_t i = 0; i < kinds.size(); ++i)
        extend_scan(scans[i], detail::make_scenario(config, kinds[i]), new_end);
      report.config.t_end = new_end;
      ++report.doublings;
    }
  }

  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const DenseScan& s = scans[i];
    KindSummary ks;
    ks.kind = kinds[i];
    OptimalTime best = s.global_min;
    if (config.refine_optimum) {
      const auto sc = detail::make_scenario(config, kinds[i]);
      const double lo = std::max(config.t_start, best.t_star - step);
      const double hi = std::min(report.config.t_end, best.t_star + step);
      const auto f = [&](double t) { return sample_witness(sc, t).witness; };
      const OptimalTime refined = detail::golden_section(f, lo, hi, 1e-6);
      if (refined.value < best.value) best = refined;
    }
    ks.t_star = best.t_star;
    ks.witness_min = best.value;
    ks.revivals = revival_minima(s.windows, config.t_start, report.config.t_end, radius);
    report.kinds.push_back(std::move(ks));
    report.max_photon_number = std::max(report.max_photon_number, s.max_photons);
    report.scan_points += s.points;
  }
  report.t_star = report.kinds.front().t_star;
  report.witness_min = report.kinds.front().witness_min;
  report.timestamp = utc_timestamp();
  return report;
}

/// Uniform output grid over [t_start, t_end] with n_points samples.
inline std::vector<double> output_grid(const ScenarioConfig& cfg) {
  std::vector<double> grid(static_cast<std::size_t>(cfg.n_points));
  const double span = cfg.t_end - cfg.t_start;
  for (int i = 0; i < cfg.n_points; ++i)
    grid[static_cast<std::size_t>(i)] =
        i + 1 == cfg.n_points ? cfg.t_end : cfg.t_start + span * static_cast<double>(i) / (cfg.n_points - 1);
  return grid;
}

inline const char* kCsvHeader = "t,E_GHZ,E_W,n_c,kappa_abs,fidelity_sq";

/// Writes the time series for `cfg` (already resolved) in its output format.
inline void write_data(std::ostream& out, const ScenarioConfig& cfg) {
  const Dynamics dyn = cfg.dissipative ? Dynamics::dissipative : Dynamics::closed;
  const bool want_ghz = cfg.witness_kind != WitnessSelection::w;
  const bool want_w = cfg.witness_kind != WitnessSelection::ghz;
  const auto grid = output_grid(cfg);
  const auto fmt = [](double x) { return format_double(x, 12); };
  if (cfg.output_format == OutputFormat::csv) {
    std::istringstream echo(config_to_ini(cfg));
    out << "# ecsim " << kVersion << " resolved configuration\n";
    for (std::string line; std::getline(echo, line);) out << "# " << line << "\n";
    out << kCsvHeader << "\n";
    for (double t : grid) {
      const DualSample s = sample_both(cfg.params, cfg.cat, dyn, cfg.coherence_model, t);
      out << fmt(t) << ',' << (want_ghz ? fmt(s.ghz) : "") << ',' << (want_w ? fmt(s.w) : "") << ','
          << fmt(s.photons) << ',' << fmt(s.kappa_abs) << ',' << fmt(want_ghz ? s.fidelity_ghz : s.fidelity_w)
          << "\n";
    }
  } else {
    nlohmann::ordered_json j;
    j["tool_version"] = kVersion;
    j["config"] = config_to_json(cfg);
    j["columns"] = {"t", "E_GHZ", "E_W", "n_c", "kappa_abs", "fidelity_sq"};
    auto rows = nlohmann::ordered_json::array();
    for (double t : grid) {
      const DualSample s = sample_both(cfg.params, cfg.cat, dyn, cfg.coherence_model, t);
      rows.push_back({t, want_ghz ? nlohmann::ordered_json(s.ghz) : nlohmann::ordered_json(nullptr),
                      want_w ? nlohmann::ordered_json(s.w) : nlohmann::ordered_json(nullptr), s.photons, s.kappa_abs,
                      want_ghz ? s.fidelity_ghz : s.fidelity_w});
    }
    j["rows"] = std::move(rows);
    out << j.dump(1) << "\n";
  }
  if (!out) throw std::runtime_error("failed writing data output");
}

inline void write_data_file(const std::filesystem::path& path, const ScenarioConfig& cfg) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  write_data(out, cfg);
  out.close();
  if (!out) throw std::runtime_error("failed writing output file " + path.string());
}

inline nlohmann::ordered_json report_to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["t_star"] = r.t_star;
  j["witness_min"] = r.witness_min;
  j["max_photon_number"] = r.max_photon_number;
  auto kinds = nlohmann::ordered_json::array();
  for (const auto& k : r.kinds) {
    auto rev = nlohmann::ordered_json::array();
    for (const auto& m : k.revivals) rev.push_back({{"t", m.t}, {"value", m.value}});
    kinds.push_back({{"kind", k.kind == WitnessKind::ghz ? "ghz" : "w"},
                     {"t_star", k.t_star},
                     {"witness_min", k.witness_min},
                     {"revival_minima", rev}});
  }
  j["witnesses"] = kinds;
  j["scan_points"] = r.scan_points;
  j["window_doublings"] = r.doublings;
  j["config"] = config_to_json(r.config);
  j["tool_version"] = r.tool_version;
  j["timestamp"] = r.timestamp;
  return j;
}

/// Runs the scenario, writes the data file when an output path is set, and
/// returns the summary.
inline RunReport run_scenario(const ScenarioConfig& config) {
  RunReport report = analyze_scenario(config);
  if (!report.config.output_path.empty()) write_data_file(report.config.output_path, report.config);
  return report;
}

// ---------------------------------------------------------------------------
// Sweeps

inline const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes = {"delta", "gamma_c", "gamma_e", "alpha"};
  return axes;
}

/// Copy of `base` with one parameter replaced. `alpha` sets alpha1 = a, alpha2 = -a.
inline ScenarioConfig apply_axis(const ScenarioConfig& base, const std::string& axis, double value) {
  ScenarioConfig cfg = base;
  if (axis == "delta") cfg.params.delta = value;
  else if (axis == "gamma_c") cfg.params.gamma_c = value;
  else if (axis == "gamma_e") cfg.params.gamma_e = value;
  else if (axis == "alpha") {
    cfg.cat.alpha1 = Complex(value, 0.0);
    cfg.cat.alpha2 = Complex(-value, 0.0);
  } else {
    throw ConfigError("unknown sweep axis '" + axis + "' (expected delta, gamma_c, gamma_e or alpha)");
  }
  return cfg;
}

struct SweepRow {
  double value = 0.0;
  RunReport report;
};

inline std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const std::string& axis,
                                       const std::vector<double>& values) {
  if (std::find(sweep_axes().begin(), sweep_axes().end(), axis) == sweep_axes().end())
    throw ConfigError("unknown sweep axis '" + axis + "' (expected delta, gamma_c, gamma_e or alpha)");
  std::vector<SweepRow> rows;
  for (double v : values) {
    ScenarioConfig cfg = apply_axis(base, axis, v);
    cfg.output_path.clear();
    rows.push_back({v, analyze_scenario(cfg)});
  }
  return rows;
}

inline void write_sweep(std::ostream& out, const ScenarioConfig& base, const std::string& axis,
                        const std::vector<SweepRow>& rows, OutputFormat format) {
  if (format == OutputFormat::csv) {
    std::istringstream echo(config_to_ini(base));
    out << "# ecsim " << kVersion << " sweep over " << axis << "; base configuration\n";
    for (std::string line; std::getline(echo, line);) out << "# " << line << "\n";
    out << axis << ",t_star,witness_min,max_photon_number,t_end,revival_minima\n";
    for (const auto& r : rows)
      out << format_double(r.value, 12) << ',' << format_double(r.report.t_star, 12) << ','
          << format_double(r.report.witness_min, 12) << ',' << format_double(r.report.max_photon_number, 12) << ','
          << format_double(r.report.config.t_end, 12) << ',' << r.report.kinds.front().revivals.size() << "\n";
  } else {
    nlohmann::ordered_json j;
    j["tool_version"] = kVersion;
    j["axis"] = axis;
    j["base_config"] = config_to_json(base);
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      auto rep = report_to_json(r.report);
      rep.erase("timestamp");
      arr.push_back({{"value", r.value}, {"report", rep}});
    }
    j["rows"] = arr;
    out << j.dump(1) << "\n";
  }
  if (!out) throw std::runtime_error("failed writing sweep output");
}

}  // namespace ecsim
