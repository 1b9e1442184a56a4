// Command-line front end: run scenarios and presets, sweep parameters, validate.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecsim/ecsim.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kValidation = 2, kResource = 3 };

struct OutputFlags {
  std::string output;
  std::string format;
  int points = 0;
};

void add_output_flags(CLI::App* cmd, OutputFlags& flags) {
  cmd->add_option("--output,-o", flags.output, "Data file path");
  cmd->add_option("--format", flags.format, "Data format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--points", flags.points, "Number of output time points")->check(CLI::Range(2, 100000000));
}

void apply_output_flags(ecsim::ScenarioConfig& cfg, const OutputFlags& flags, const std::string& stem) {
  if (!flags.format.empty()) cfg.output_format = ecsim::parse_output_format("--format", flags.format);
  if (flags.points > 0) cfg.n_points = flags.points;
  if (!flags.output.empty()) cfg.output_path = flags.output;
  if (cfg.output_path.empty()) cfg.output_path = stem + "." + ecsim::to_string(cfg.output_format);
}

int run_and_report(const ecsim::ScenarioConfig& cfg) {
  const ecsim::RunReport report = ecsim::run_scenario(cfg);
  std::cout << ecsim::report_to_json(report).dump(2) << "\n";
  return kOk;
}

void print_error(const char* kind, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = message;
  j["kind"] = kind;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entangled coherent GHZ/W state simulator for three coupled cavities"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ecsim::kVersion));

  std::string config_path;
  OutputFlags run_flags;
  auto* run = app.add_subcommand("run", "Run a scenario from a configuration file");
  run->add_option("config", config_path, "INI configuration")->required();
  add_output_flags(run, run_flags);

  std::string sweep_config, axis;
  std::vector<double> values;
  OutputFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Repeat a scenario over values of one parameter");
  sweep->add_option("config", sweep_config, "INI configuration")->required();
  sweep->add_option("--axis", axis, "delta, gamma_c, gamma_e or alpha")->required();
  sweep->add_option("--values", values, "Comma-separated values")->delimiter(',')->expected(0, -1);
  add_output_flags(sweep, sweep_flags);

  bool full = false;
  bool printed_prefactor = false;
  auto* validate = app.add_subcommand("validate", "Run the self-checks (add --full for the Fock-space oracle)");
  validate->add_flag("--full", full, "Include oracle comparisons (minutes)");
  validate->add_flag("--printed-u2-prefactor", printed_prefactor)->group("");

  std::string preset_name;
  OutputFlags preset_flags;
  bool show_config = false;
  auto* preset = app.add_subcommand("preset", "Run a bundled figure preset (fig02 .. fig13)");
  preset->add_option("name", preset_name, "Preset name")->required();
  preset->add_flag("--show-config", show_config, "Print the preset configuration and exit");
  add_output_flags(preset, preset_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) {
      ecsim::ScenarioConfig cfg = ecsim::load_config(config_path);
      apply_output_flags(cfg, run_flags, std::filesystem::path(config_path).stem().string());
      return run_and_report(cfg);
    }
    if (*preset) {
      ecsim::ScenarioConfig cfg = ecsim::load_preset(preset_name);
      if (show_config) {
        std::cout << ecsim::config_to_ini(cfg);
        return kOk;
      }
      apply_output_flags(cfg, preset_flags, preset_name);
      return run_and_report(cfg);
    }
    if (*sweep) {
      ecsim::ScenarioConfig base = ecsim::load_config(sweep_config);
      base.validate();
      if (!sweep_flags.format.empty()) base.output_format = ecsim::parse_output_format("--format", sweep_flags.format);
      if (sweep_flags.points > 0) base.n_points = sweep_flags.points;
      const auto rows = ecsim::run_sweep(base, axis, values);
      std::string out_path = sweep_flags.output;
      if (out_path.empty())
        out_path = std::filesystem::path(sweep_config).stem().string() + "_sweep_" + axis + "." +
                   ecsim::to_string(base.output_format);
      std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot open output file " + out_path);
      ecsim::write_sweep(out, base, axis, rows, base.output_format);
      for (const auto& r : rows)
        std::cout << axis << "=" << r.value << " witness_min=" << r.report.witness_min
                  << " t_star=" << r.report.t_star << " max_photon_number=" << r.report.max_photon_number << "\n";
      std::cout << rows.size() << " runs written to " << out_path << "\n";
      return kOk;
    }
    if (*validate) {
      ecsim::ValidationOptions opts;
      opts.level = full ? ecsim::ValidationLevel::full : ecsim::ValidationLevel::fast;
      opts.propagator.printed_u2_prefactor = printed_prefactor;
      opts.progress = &std::cerr;
      const auto report = ecsim::run_validation(opts);
      ecsim::print_validation(std::cout, report);
      return report.passed() ? kOk : kValidation;
    }
  } catch (const ecsim::ResourceRefusal& e) {
    print_error("resource", e.what());
    return kResource;
  } catch (const ecsim::DegenerateSuperposition& e) {
    print_error("config", e.what());
    return kConfig;
  } catch (const ecsim::ConfigError& e) {
    print_error("config", e.what());
    return kConfig;
  } catch (const ecsim::TruncationError& e) {
    print_error("config", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    print_error("runtime", e.what());
    return kConfig;
  }
  return kOk;
}
