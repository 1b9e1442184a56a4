// Acceptance suite. Prints one PASS/FAIL line per criterion.
//   acceptance                 run everything
//   acceptance --criterion N   run criterion N only

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ecsim/ecsim.hpp"

using namespace ecsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct TimedRun {
  RunReport report;
  double seconds = 0.0;
};

TimedRun run_preset(const std::string& name) {
  ScenarioConfig cfg = load_preset(name);
  cfg.output_path = (fs::temp_directory_path() / ("ecsim_acceptance_" + name + ".csv")).string();
  Stopwatch sw;
  TimedRun r{run_scenario(cfg), 0.0};
  r.seconds = sw.seconds();
  fs::remove(cfg.output_path);
  return r;
}

SystemParams standard(double delta) {
  SystemParams p;
  p.g = 30.0;
  p.c_hop = 1.0;
  p.delta = delta;
  return p;
}

Outcome propagator_equivalence() {
  Stopwatch sw;
  const double err = propagator_equivalence_error(parameter_draws(200));
  const double secs = sw.seconds();
  return {err < 1e-9 && secs < 5.0,
          "max |closed form - exp(-iMt)| = " + fmt(err) + " (< 1e-9), runtime " + fmt(secs) + " s (< 5 s)"};
}

Outcome unitarity_symmetry() {
  const auto draws = parameter_draws(200);
  const double u = unitarity_error(draws);
  const double s = symmetry_error(draws);
  return {u < 1e-12 && s < 1e-12, "unitarity " + fmt(u) + ", symmetry " + fmt(s) + " (both < 1e-12)"};
}

Outcome witness_depth(const std::string& a, const std::string& b, double bound) {
  Outcome out{true, ""};
  for (const auto& name : {a, b}) {
    const TimedRun r = run_preset(name);
    const bool ok = r.report.witness_min <= bound && r.seconds < 10.0;
    out.pass = out.pass && ok;
    out.detail += name + ": min " + fmt(r.report.witness_min) + " at t=" + fmt(r.report.t_star) + " (<= " +
                  fmt(bound) + "), " + fmt(r.seconds) + " s; ";
  }
  out.detail += "runtime limit 10 s per scenario";
  return out;
}

Outcome photon_suppression() {
  Outcome out{true, ""};
  for (auto [res, det] : {std::pair{"fig02", "fig03"}, std::pair{"fig04", "fig05"}}) {
    const double n_res = analyze_scenario(load_preset(res)).max_photon_number;
    const double n_det = analyze_scenario(load_preset(det)).max_photon_number;
    const double ratio = n_det / n_res;
    out.pass = out.pass && ratio < 0.1;
    out.detail += std::string(det) + "/" + res + " max photons " + fmt(n_det) + "/" + fmt(n_res) +
                  " ratio " + fmt(ratio) + " (< 0.1); ";
  }
  return out;
}

Outcome photon_formula_reduction() {
  double worst = 0.0;
  for (double delta : {0.0, -500.0}) {
    const SystemParams p = standard(delta);
    const double t_end = delta == 0.0 ? 3.0 : 400.0;
    for (double alpha : {0.01, 0.5, 2.0}) {
      const double a2 = alpha * alpha;
      for (double theta : {0.0, kPi}) {
        const CatStateSpec cat = CatStateSpec::symmetric(alpha, theta);
        for (int i = 0; i < 1000; ++i) {
          const double t = t_end * i / 999.0;
          const auto m = mode_coefficients(p, t, Dynamics::closed);
          const double weight = std::norm(m.u21) + 2.0 * std::norm(m.u22);
          // even: alpha^2 tanh(alpha^2) weight, odd: alpha^2 coth(alpha^2) weight
          const double printed = theta == 0.0 ? a2 * std::tanh(a2) * weight : a2 / std::tanh(a2) * weight;
          worst = std::max(worst, std::abs(mean_cavity_photons(m, cat) - printed));
        }
      }
    }
  }
  return {worst < 1e-12, "max deviation from the even/odd photon formulas " + fmt(worst) + " (< 1e-12)"};
}

Outcome oracle_closed() {
  Stopwatch sw;
  const double d =
      closed_oracle_distance(standard(0.0), CatStateSpec::symmetric(0.5, 0.0), 10, closed_oracle_times());
  const double secs = sw.seconds();
  return {d < 1e-6 && secs < 120.0,
          "max trace distance over 20 times " + fmt(d) + " (< 1e-6), runtime " + fmt(secs) + " s (< 120 s)"};
}

Outcome oracle_dissipative() {
  SystemParams p = standard(0.0);
  p.gamma_c = 0.05;
  p.gamma_e = 0.001;
  const CatStateSpec cat = CatStateSpec::symmetric(0.5, 0.0);
  const int n_max = required_n_max(std::norm(cat.alpha1));
  Stopwatch sw;
  const OracleArbitration a = lindblad_oracle_distances(p, cat, n_max, lindblad_oracle_times());
  const double secs = sw.seconds();
  return {a.dilation_distance < 1e-4 && secs < 600.0,
          "n_max=" + std::to_string(n_max) + ", dilation_consistent max distance " + fmt(a.dilation_distance) +
              " (< 1e-4), cavity_only max distance " + fmt(a.cavity_only_distance) + " (reported), runtime " +
              fmt(secs) + " s (< 600 s)"};
}

Outcome robustness_ordering() {
  Outcome out{true, ""};
  for (auto [res, det] : {std::pair{"fig08", "fig09"}, std::pair{"fig12", "fig13"}}) {
    const RunReport r = analyze_scenario(load_preset(res));
    const RunReport d = analyze_scenario(load_preset(det));
    const bool windows_ok = r.kinds.front().revivals.size() >= 3 && d.kinds.front().revivals.size() >= 3;
    const bool ok = windows_ok && d.witness_min < r.witness_min;
    out.pass = out.pass && ok;
    out.detail += std::string(det) + " min " + fmt(d.witness_min) + " (t_end " + fmt(d.config.t_end) + ", " +
                  std::to_string(d.kinds.front().revivals.size()) + " revivals) vs " + res + " min " +
                  fmt(r.witness_min) + " (t_end " + fmt(r.config.t_end) + ", " +
                  std::to_string(r.kinds.front().revivals.size()) + " revivals); ";
  }
  out.detail += "required: detuned strictly more negative";
  return out;
}

Outcome exciton_loss_decay() {
  Outcome out{true, ""};
  for (const char* name : {"fig06", "fig07", "fig10", "fig11"}) {
    const RunReport r = analyze_scenario(load_preset(name));
    const auto& rev = r.kinds.front().revivals;
    bool ok = rev.size() >= 3;
    for (std::size_t i = 1; i < rev.size(); ++i) ok = ok && rev[i].value > rev[i - 1].value;
    out.pass = out.pass && ok;
    out.detail += std::string(name) + ":";
    for (const auto& m : rev) out.detail += " " + fmt(m.value) + "@" + fmt(m.t);
    out.detail += "; ";
  }
  out.detail += "required: >= 3 minima, each less negative than the previous";
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

Outcome determinism() {
  Outcome out{true, ""};
  const fs::path dir = fs::temp_directory_path() / "ecsim_acceptance_determinism";
  fs::create_directories(dir);
  for (const auto& name : preset_names()) {
    std::string text[2];
    // same output path both times; the file echoes its own path
    const fs::path file = dir / (name + ".csv");
    for (int k = 0; k < 2; ++k) {
      fs::remove(file);
      const std::string cmd =
          std::string(ECSIM_CLI_PATH) + " preset " + name + " --output " + file.string() + " > /dev/null";
      if (std::system(cmd.c_str()) != 0) {
        out.pass = false;
        out.detail += name + ": CLI failed; ";
      }
      text[k] = slurp(file);
    }
    const bool same = !text[0].empty() && text[0] == text[1];
    out.pass = out.pass && same;
    if (!same) out.detail += name + " differs; ";
  }
  fs::remove_all(dir);
  out.detail += "12 presets run twice through the CLI, outputs " +
                std::string(out.pass ? "byte-identical" : "NOT identical");
  return out;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "propagator equivalence", propagator_equivalence},
      {2, "unitarity and symmetry", unitarity_symmetry},
      {3, "GHZ generation", [] { return witness_depth("fig02", "fig03", -0.49); }},
      {4, "W generation", [] { return witness_depth("fig04", "fig05", -0.32); }},
      {5, "photon suppression", photon_suppression},
      {6, "photon formula reduction", photon_formula_reduction},
      {7, "oracle, closed", oracle_closed},
      {8, "oracle, dissipative", oracle_dissipative},
      {9, "robustness ordering under cavity loss", robustness_ordering},
      {10, "exciton-only loss decay", exciton_loss_decay},
      {11, "determinism", determinism},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 2;
    }
  }

  bool all = true;
  int ran = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "[AC" << c.id << "] " << (o.pass ? "PASS" : "FAIL") << " " << c.title << ": " << o.detail
              << std::endl;
    all = all && o.pass;
  }
  if (ran == 0) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  return all ? 0 : 1;
}
