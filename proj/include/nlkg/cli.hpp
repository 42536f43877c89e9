#pragma once

// Configuration, deterministic emission and subcommand bodies for the nlkg
// command-line tool. Every command returns its artifact as a string; the
// executable only decides where the bytes go.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nlkg/bifurcation.hpp"
#include "nlkg/coercivity.hpp"
#include "nlkg/simulator.hpp"
#include "nlkg/spectral.hpp"

namespace nlkg::cli {

using Json = nlohmann::ordered_json;

enum class Format { Csv, Json };

std::string_view to_string(Format f);
Format parse_format(std::string_view s);  // "csv" | "json", else InvalidConfig

/// A frequency or charge given either as a number or by name. Names are
/// omega_m, omega_M, omega_s (frequencies) and sigma_m, sigma_M, sigma_s,
/// sigma_2 (levels), all taken from the bifurcation report.
using Selector = std::variant<double, std::string>;

/// Config file schema. Absent keys take these defaults:
///   grid.L        40 / sqrt(m^2 - omega^2)
///   grid.n        4096 half-line intervals
///   sim.N         4096 periodic points
///   sim.L_d       40 / sqrt(m^2 - omega^2)
///   sim.dt        dx / 2
///   sim.t_end     50
///   sim.eps       0 (perturbation amplitude)
///   sim.seed      0
///   sim.perturbation  "bump" when eps > 0, else "none"; or "random"
///   sim.sample_every  10 steps
///   curve.points  401 uniform frequencies (critical ones are added)
///   demo.s0       positive zero of W, required for coercivity-demo
///   demo.k_max    100
///   output.format csv for tables, json for reports
///   output.path   standard output
/// Unknown keys anywhere are rejected.
struct RunConfig {
  double a = 0, b = 0, m = 0;
  std::optional<Selector> omega;
  std::optional<Selector> sigma;
  std::optional<int> branch;  // root index at the sigma level for simulate

  struct Grid {
    std::optional<double> L;
    std::optional<int> n;
  } grid;

  struct Sim {
    std::optional<double> dt, t_end;
    std::optional<int> N;
    std::optional<double> L_d;
    std::optional<double> eps;
    std::optional<std::uint64_t> seed;
    std::optional<PerturbationKind> perturbation;
    std::optional<int> sample_every;
  } sim;

  struct Curve {
    std::optional<int> points;
  } curve;

  struct Demo {
    std::optional<double> s0;
    std::optional<int> k_max;
  } demo;

  struct Output {
    std::optional<Format> format;
    std::optional<std::string> path;
  } output;
};

/// Throws Error(InvalidConfig) on schema violations.
RunConfig parse_config(const Json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
Json to_json(const RunConfig& cfg);

/// Validated parameters (tau > 1).
ModelParams params_of(const RunConfig& cfg);
double resolve_omega(const RunConfig& cfg, const ModelParams& p);
double resolve_sigma(const RunConfig& cfg, const ModelParams& p);

// -- Reports --------------------------------------------------------------

Json to_json(const BifurcationReport& rep);
BifurcationReport bifurcation_report_from_json(const Json& j);
Json to_json(const LevelClassification& lc);
LevelClassification level_classification_from_json(const Json& j);
Json to_json(const HessianReport& rep);
HessianReport hessian_report_from_json(const Json& j);

/// Column-major numeric table; CSV cells use 17 significant digits.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string csv() const;
  Json json() const;  // {"columns": [...], "rows": [[...], ...]}
  std::string render(Format f) const;
};

Table profile_table(const Profile& prof, bool full_line);
Table curve_table(const ModelParams& p, int points);
Table series_table(const TimeSeries& ts);
Table coercivity_table(const CoercivityTable& t);

std::string format_number(double v);

// -- Commands -------------------------------------------------------------

std::string cmd_profile(const RunConfig& cfg, Format f, bool full_line = false);
std::string cmd_curve(const RunConfig& cfg, Format f);
std::string cmd_analyze(const RunConfig& cfg, Format f);
std::string cmd_classify(const RunConfig& cfg, Format f);
std::string cmd_hessian(const RunConfig& cfg, Format f);
SimConfig sim_config_of(const RunConfig& cfg);
std::string render_series(const TimeSeries& ts, Format f);
/// SimulationBlowup propagates; render its partial() series if wanted.
std::string cmd_simulate(const RunConfig& cfg, Format f);
/// Builds the relaxed (tau <= 1) parameters itself.
std::string cmd_coercivity_demo(const RunConfig& cfg, Format f);

/// 0 success, 2 validation error, 3 numerical failure.
int exit_code(const Error& e);

}  // namespace nlkg::cli
