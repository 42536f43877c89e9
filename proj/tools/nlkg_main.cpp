// nlkg: standing waves of the sextic nonlinear Klein-Gordon equation.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>

#include "nlkg/cli.hpp"

namespace {

using namespace nlkg;
using namespace nlkg::cli;

constexpr const char* kDefaults = R"(Config keys and defaults (JSON, unknown keys rejected):
  a, b, m            required; tau = 2 m^2 b / a^2 must exceed 1 (except coercivity-demo)
  omega              number or omega_m | omega_M | omega_s (profile, hessian, simulate)
  sigma              number or sigma_m | sigma_M | sigma_s | sigma_2 (classify, simulate)
  branch             root index at the sigma level (simulate); default: first minimum
  grid.L             40 / sqrt(m^2 - omega^2)
  grid.n             4096 half-line intervals
  sim.N              4096 periodic points
  sim.L_d            40 / sqrt(m^2 - omega^2)
  sim.dt             dx / 2
  sim.t_end          50
  sim.eps            0
  sim.perturbation   bump when eps > 0, else none (also: random)
  sim.seed           0
  sim.sample_every   10
  curve.points       401
  demo.s0            smallest positive zero of W
  demo.k_max         100
  sigma (demo)       1
  output.format      csv for profile, curve, simulate, coercivity-demo; json otherwise
  output.path        standard output
Without --config, coercivity-demo uses a = 1, b = 1/2, m = 1.
Exit codes: 0 success, 2 invalid input, 3 numerical failure.)";

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Standing waves of phi_tt - phi_xx + m^2 phi - 4a|phi|^2 phi + 6b|phi|^4 phi = 0"};
  app.footer(kDefaults);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path, format_name;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_path, "Output file (default: standard output)");
  app.add_option("--format", format_name, "csv or json (default depends on the command)")
      ->check(CLI::IsMember({"csv", "json"}));

  bool full_line = false;
  auto* profile = app.add_subcommand("profile", "Standing-wave profile: columns x, R, Rprime");
  profile->add_flag("--full-line", full_line, "Reflect onto [-L, L] (default: half line)");
  app.add_subcommand("curve", "Charge curve: columns omega, sigma, sigma_prime, energy");
  app.add_subcommand("analyze", "Bifurcation report (JSON)");
  app.add_subcommand("classify", "Classification of a charge level (JSON)");
  app.add_subcommand("hessian", "Constrained Hessian diagnostics (JSON)");
  app.add_subcommand("simulate", "Time series: t, energy, charge, orbital_distance, sup_norm");
  app.add_subcommand("coercivity-demo", "Non-coercivity table for tau <= 1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const bool tabular = command == "profile" || command == "curve" || command == "simulate" ||
                       command == "coercivity-demo";

  RunConfig cfg;
  Format format = tabular ? Format::Csv : Format::Json;
  try {
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else if (command == "coercivity-demo") {
      cfg.a = 1.0;
      cfg.b = 0.5;
      cfg.m = 1.0;
    } else {
      throw Error(ErrorKind::InvalidConfig, command + " needs --config");
    }
    if (cfg.output.format) format = *cfg.output.format;
    if (!format_name.empty()) format = parse_format(format_name);
    if (out_path.empty() && cfg.output.path) out_path = *cfg.output.path;

    const std::map<std::string, std::function<std::string()>> commands{
        {"profile", [&] { return cmd_profile(cfg, format, full_line); }},
        {"curve", [&] { return cmd_curve(cfg, format); }},
        {"analyze", [&] { return cmd_analyze(cfg, format); }},
        {"classify", [&] { return cmd_classify(cfg, format); }},
        {"hessian", [&] { return cmd_hessian(cfg, format); }},
        {"simulate", [&] { return cmd_simulate(cfg, format); }},
        {"coercivity-demo", [&] { return cmd_coercivity_demo(cfg, format); }},
    };
    emit(commands.at(command)(), out_path);
    return 0;
  } catch (const SimulationBlowup& e) {
    std::cerr << "nlkg: " << e.what() << " (partial series written)\n";
    try {
      emit(render_series(e.partial(), format), out_path);
    } catch (const std::exception& inner) {
      std::cerr << "nlkg: " << inner.what() << "\n";
    }
    return 3;
  } catch (const Error& e) {
    std::cerr << "nlkg: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "nlkg: " << e.what() << "\n";
    return 2;
  }
}
