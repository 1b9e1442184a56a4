#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "ecsim/scenario.hpp"

using namespace ecsim;

namespace {

ScenarioConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test");
}

std::string expect_config_error(const std::string& text) {
  try {
    parse(text).validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return {};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

}  // namespace

TEST(ParseComplex, Forms) {
  EXPECT_EQ(parse_complex_field("x", "2"), Complex(2.0, 0.0));
  EXPECT_EQ(parse_complex_field("x", " -0.5 "), Complex(-0.5, 0.0));
  EXPECT_EQ(parse_complex_field("x", "0.5+0.3i"), Complex(0.5, 0.3));
  EXPECT_EQ(parse_complex_field("x", "0.5 - 0.3i"), Complex(0.5, -0.3));
  EXPECT_EQ(parse_complex_field("x", "-2i"), Complex(0.0, -2.0));
  EXPECT_EQ(parse_complex_field("x", "i"), Complex(0.0, 1.0));
  EXPECT_EQ(parse_complex_field("x", "1e-3-2.5e+1j"), Complex(1e-3, -25.0));
  EXPECT_THROW(parse_complex_field("x", "abc"), ConfigError);
  EXPECT_THROW(parse_complex_field("x", "1+2"), ConfigError);
  for (Complex z : {Complex(0.1, -0.2), Complex(-3.0, 0.0), Complex(0.0, 1e-9)})
    EXPECT_EQ(parse_complex_field("x", format_complex(z)), z);
}

TEST(Config, ParsesAllSections) {
  const auto cfg = parse(
      "[params]\nomega_c = 1.5\ndelta = -500\ng = 30\nc_hop = 1\ngamma_c = 0.05\ngamma_e = 0.001\n"
      "[cat]\nalpha1 = 0.5+0.1i\nalpha2 = -0.5\ntheta = 3.14\n"
      "[run]\nwitness_kind = both\ndissipative = true\ncoherence_model = paper_literal\nt_start = 1\n"
      "t_end = 2\nn_points = 11\nrefine_optimum = false\noutput_path = x.json\noutput_format = json\n"
      "auto_extend = yes\n");
  EXPECT_EQ(cfg.params.omega_c, 1.5);
  EXPECT_EQ(cfg.params.delta, -500.0);
  EXPECT_EQ(cfg.cat.alpha1, Complex(0.5, 0.1));
  EXPECT_EQ(cfg.witness_kind, WitnessSelection::both);
  EXPECT_TRUE(cfg.dissipative);
  EXPECT_EQ(cfg.coherence_model, CoherenceModel::cavity_only);
  EXPECT_EQ(cfg.n_points, 11);
  EXPECT_FALSE(cfg.refine_optimum);
  EXPECT_EQ(cfg.output_format, OutputFormat::json);
  EXPECT_TRUE(cfg.auto_extend);
  // round trip through the echo
  const auto again = parse(config_to_ini(cfg));
  EXPECT_EQ(config_to_ini(again), config_to_ini(cfg));
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(expect_config_error("[params]\ng = 0\n").find("params.g"), std::string::npos);
  EXPECT_NE(expect_config_error("[params]\ng = 30\ngamma_c = -1\n").find("params.gamma_c"), std::string::npos);
  EXPECT_NE(expect_config_error("[params]\ng = 30\n[run]\nt_end = -1\n").find("run.t_end"), std::string::npos);
  EXPECT_NE(expect_config_error("[params]\ng = 30\n[run]\nn_points = 1\n").find("run.n_points"), std::string::npos);
  EXPECT_NE(expect_config_error("[params]\ngee = 30\n").find("params.gee"), std::string::npos);
  EXPECT_NE(expect_config_error("[params]\ng = thirty\n").find("params.g"), std::string::npos);
  EXPECT_NE(expect_config_error("[run]\nwitness_kind = xyz\n").find("run.witness_kind"), std::string::npos);
  EXPECT_NE(expect_config_error("[extra]\na = 1\n").find("extra"), std::string::npos);
}

TEST(Config, DegenerateSuperposition) {
  const auto cfg = parse("[params]\ng = 30\n[cat]\nalpha1 = 1\nalpha2 = 1\ntheta = 3.141592653589793\n");
  try {
    cfg.validate();
    FAIL();
  } catch (const DegenerateSuperposition& e) {
    EXPECT_STREQ(e.what(), "degenerate superposition");
  }
}

TEST(Presets, MatchCaptions) {
  for (const auto& name : preset_names()) {
    const auto cfg = load_preset(name);
    EXPECT_NO_THROW(cfg.validate()) << name;
    EXPECT_EQ(cfg.params.c_hop, 1.0);
    EXPECT_EQ(cfg.params.g, 30.0);
    const int fig = std::stoi(name.substr(3));
    EXPECT_EQ(cfg.params.delta, fig % 2 == 0 ? 0.0 : -500.0) << name;
    const bool ghz = fig <= 3 || (fig >= 6 && fig <= 9);
    EXPECT_EQ(cfg.witness_kind, ghz ? WitnessSelection::ghz : WitnessSelection::w) << name;
    EXPECT_EQ(cfg.cat.alpha1, Complex(ghz ? 2.0 : 0.01, 0.0));
    EXPECT_EQ(cfg.dissipative, fig >= 6) << name;
    if (fig >= 6) EXPECT_EQ(cfg.params.gamma_e, 0.001);
    const bool cavity_loss = fig == 8 || fig == 9 || fig == 12 || fig == 13;
    EXPECT_EQ(cfg.params.gamma_c, cavity_loss ? 0.05 : 0.0) << name;
  }
  EXPECT_THROW(load_preset("fig14"), ConfigError);
}

TEST(RunScenario, ResonantGhz) {
  auto cfg = load_preset("fig02");
  cfg.n_points = 50;
  const auto r = analyze_scenario(cfg);
  EXPECT_LE(r.witness_min, -0.49);
  EXPECT_GE(r.max_photon_number, 1.0);
  EXPECT_GE(r.kinds.front().revivals.size(), 3u);
  EXPECT_GE(r.witness_min, -0.5);
}

TEST(RunScenario, DetunedW) {
  auto cfg = load_preset("fig05");
  cfg.n_points = 50;
  const auto r = analyze_scenario(cfg);
  EXPECT_LE(r.witness_min, -0.32);
  // the odd cat carries about one excitation, so the dispersive photon number
  // is the single-excitation cavity weight, not alpha^2
  double weight = 0.0;
  for (double t = 0.0; t < 400.0; t += 0.002) {
    const auto m = mode_coefficients(cfg.params, t, Dynamics::closed);
    weight = std::max(weight, std::norm(m.u21) + 2.0 * std::norm(m.u22));
  }
  const double a2 = std::norm(cfg.cat.alpha1);
  EXPECT_NEAR(r.max_photon_number, a2 / std::tanh(a2) * weight, 1e-6);
  EXPECT_LT(r.max_photon_number, 0.02);
}

TEST(WriteData, CsvLayoutAndDeterminism) {
  auto cfg = load_preset("fig04");
  cfg.n_points = 5;
  std::ostringstream a, b;
  write_data(a, cfg);
  write_data(b, cfg);
  EXPECT_EQ(a.str(), b.str());
  std::istringstream lines(a.str());
  std::string line;
  std::vector<std::string> data;
  bool header_seen = false;
  while (std::getline(lines, line)) {
    if (line.rfind("#", 0) == 0) {
      EXPECT_FALSE(header_seen);
      continue;
    }
    if (!header_seen) {
      EXPECT_EQ(line, "t,E_GHZ,E_W,n_c,kappa_abs,fidelity_sq");
      header_seen = true;
      continue;
    }
    data.push_back(line);
  }
  ASSERT_EQ(data.size(), 5u);
  // ghz column empty for a W-only run
  EXPECT_EQ(data[0].substr(0, 3), "0,,");
  // the embedded echo parses back to the same configuration
  std::string echo;
  std::istringstream again(a.str());
  while (std::getline(again, line))
    if (line.rfind("# ", 0) == 0 && line.find("ecsim") == std::string::npos) echo += line.substr(2) + "\n";
  EXPECT_EQ(config_to_ini(parse(echo)), config_to_ini(cfg));
}

TEST(WriteData, JsonLayout) {
  auto cfg = load_preset("fig02");
  cfg.n_points = 3;
  cfg.output_format = OutputFormat::json;
  std::ostringstream o;
  write_data(o, cfg);
  const auto j = nlohmann::json::parse(o.str());
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_TRUE(j["rows"][0][2].is_null());
  EXPECT_EQ(j["columns"][1], "E_GHZ");
  EXPECT_EQ(j["config"]["params"]["g"], 30.0);
}

TEST(RunScenario, WritesFileAndEchoesConfig) {
  auto cfg = load_preset("fig02");
  cfg.n_points = 7;
  const auto path = std::filesystem::temp_directory_path() / "ecsim_test_fig02.csv";
  cfg.output_path = path.string();
  const auto r = run_scenario(cfg);
  const std::string text = slurp(path);
  EXPECT_NE(text.find("t_end = " + format_double(r.config.t_end)), std::string::npos);
  EXPECT_NE(text.find("t,E_GHZ,E_W,n_c,kappa_abs,fidelity_sq\n"), std::string::npos);
  const auto j = report_to_json(r);
  EXPECT_TRUE(j.contains("timestamp"));
  EXPECT_EQ(j["tool_version"], kVersion);
  std::filesystem::remove(path);
}

TEST(Sweep, AxesAndOrdering) {
  auto base = load_preset("fig02");
  EXPECT_THROW(run_sweep(base, "g", {1.0}), ConfigError);
  EXPECT_TRUE(run_sweep(base, "alpha", {}).empty());
  const auto rows = run_sweep(base, "alpha", {0.5, 1.0, 2.0});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_LT(rows[1].report.witness_min, rows[0].report.witness_min);
  EXPECT_LT(rows[2].report.witness_min, rows[1].report.witness_min);
  EXPECT_GE(rows[2].report.witness_min, -0.5);
  std::ostringstream csv;
  write_sweep(csv, base, "alpha", rows, OutputFormat::csv);
  EXPECT_NE(csv.str().find("alpha,t_star,witness_min,max_photon_number,t_end,revival_minima\n0.5,"),
            std::string::npos);
}

TEST(Sweep, ApplyAxis) {
  const auto base = load_preset("fig08");
  EXPECT_EQ(apply_axis(base, "delta", -500).params.delta, -500.0);
  EXPECT_EQ(apply_axis(base, "gamma_c", 0.2).params.gamma_c, 0.2);
  EXPECT_EQ(apply_axis(base, "gamma_e", 0.3).params.gamma_e, 0.3);
  const auto a = apply_axis(base, "alpha", 1.5);
  EXPECT_EQ(a.cat.alpha1, Complex(1.5, 0.0));
  EXPECT_EQ(a.cat.alpha2, Complex(-1.5, 0.0));
}
