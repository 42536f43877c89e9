#include "nlkg/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace nlkg::cli {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); }

void reject_unknown(const Json& j, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  if (!j.is_object()) invalid(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      invalid("unknown key '" + where + (where.empty() ? "" : ".") + key + "'");
    }
  }
}

double number_at(const Json& v, const std::string& name) {
  if (!v.is_number()) invalid("'" + name + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) invalid("'" + name + "' must be finite");
  return x;
}

int int_at(const Json& v, const std::string& name) {
  if (!v.is_number_integer()) invalid("'" + name + "' must be an integer");
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    invalid("'" + name + "' out of range");
  }
  return static_cast<int>(x);
}

template <typename T, typename F>
void read_opt(const Json& obj, const char* key, std::optional<T>& into, F&& conv,
              const std::string& where) {
  if (auto it = obj.find(key); it != obj.end()) into = conv(*it, where + key);
}

constexpr std::array<std::string_view, 3> kOmegaNames{"omega_m", "omega_M", "omega_s"};
constexpr std::array<std::string_view, 4> kSigmaNames{"sigma_m", "sigma_M", "sigma_s", "sigma_2"};

template <std::size_t N>
Selector selector_at(const Json& v, const std::string& name,
                     const std::array<std::string_view, N>& names) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (std::find(names.begin(), names.end(), s) == names.end()) {
      invalid("'" + name + "': unknown name '" + s + "'");
    }
    return s;
  }
  return number_at(v, name);
}

void put(Json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

std::optional<double> get_opt(const Json& j, const char* key) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) return it->get<double>();
  return std::nullopt;
}

Json selector_json(const Selector& s) {
  return std::visit([](const auto& v) { return Json(v); }, s);
}

double named_value(const ModelParams& p, const std::string& name) {
  const BifurcationReport rep = name == "sigma_2" ? analyze(p) : critical_omegas(p);
  const std::optional<double>* slot = nullptr;
  if (name == "omega_m") slot = &rep.omega_m;
  if (name == "omega_M") slot = &rep.omega_M;
  if (name == "omega_s") slot = &rep.omega_s;
  if (name == "sigma_m") slot = &rep.sigma_m;
  if (name == "sigma_M") slot = &rep.sigma_M;
  if (name == "sigma_s") slot = &rep.sigma_s;
  if (name == "sigma_2") slot = &rep.sigma_2;
  if (slot == nullptr || !slot->has_value()) {
    invalid("'" + name + "' is undefined in the " + std::string(to_string(rep.regime)) +
            " regime");
  }
  return **slot;
}

double resolve(const Selector& s, const ModelParams& p) {
  if (const double* v = std::get_if<double>(&s)) return *v;
  return named_value(p, std::get<std::string>(s));
}

std::string_view perturbation_name(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::None: return "none";
    case PerturbationKind::Bump: return "bump";
    case PerturbationKind::Random: return "random";
  }
  return "none";
}

void require_json(Format f, std::string_view command) {
  if (f != Format::Json) invalid(std::string(command) + " emits a JSON report; csv is not supported");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

SpatialGrid profile_grid(const RunConfig& cfg, const ModelParams& p, double omega) {
  const double L = cfg.grid.L.value_or(default_half_width(p, omega));
  return SpatialGrid(L, cfg.grid.n.value_or(kDefaultProfileIntervals));
}

}  // namespace

std::string_view to_string(Format f) { return f == Format::Csv ? "csv" : "json"; }

Format parse_format(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  invalid("format must be csv or json (got '" + std::string(s) + "')");
}

// ---------------------------------------------------------------------------
// Config

RunConfig parse_config(const Json& j) {
  reject_unknown(j, {"a", "b", "m", "omega", "sigma", "branch", "grid", "sim", "curve", "demo",
                     "output"},
                 "");
  RunConfig cfg;
  for (const char* key : {"a", "b", "m"}) {
    if (!j.contains(key)) invalid(std::string("missing required key '") + key + "'");
  }
  cfg.a = number_at(j["a"], "a");
  cfg.b = number_at(j["b"], "b");
  cfg.m = number_at(j["m"], "m");
  if (j.contains("omega")) cfg.omega = selector_at(j["omega"], "omega", kOmegaNames);
  if (j.contains("sigma")) cfg.sigma = selector_at(j["sigma"], "sigma", kSigmaNames);
  read_opt(j, "branch", cfg.branch, int_at, "");

  if (auto it = j.find("grid"); it != j.end()) {
    reject_unknown(*it, {"L", "n"}, "grid");
    read_opt(*it, "L", cfg.grid.L, number_at, "grid.");
    read_opt(*it, "n", cfg.grid.n, int_at, "grid.");
  }
  if (auto it = j.find("sim"); it != j.end()) {
    reject_unknown(*it, {"dt", "t_end", "N", "L_d", "eps", "seed", "perturbation", "sample_every"},
                   "sim");
    const Json& s = *it;
    read_opt(s, "dt", cfg.sim.dt, number_at, "sim.");
    read_opt(s, "t_end", cfg.sim.t_end, number_at, "sim.");
    read_opt(s, "N", cfg.sim.N, int_at, "sim.");
    read_opt(s, "L_d", cfg.sim.L_d, number_at, "sim.");
    read_opt(s, "eps", cfg.sim.eps, number_at, "sim.");
    read_opt(s, "sample_every", cfg.sim.sample_every, int_at, "sim.");
    if (auto seed = s.find("seed"); seed != s.end()) {
      if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<std::int64_t>() >= 0)) {
        invalid("'sim.seed' must be a non-negative integer");
      }
      cfg.sim.seed = seed->get<std::uint64_t>();
    }
    if (auto kind = s.find("perturbation"); kind != s.end()) {
      const std::string name = kind->is_string() ? kind->get<std::string>() : "";
      if (name == "none") cfg.sim.perturbation = PerturbationKind::None;
      else if (name == "bump") cfg.sim.perturbation = PerturbationKind::Bump;
      else if (name == "random") cfg.sim.perturbation = PerturbationKind::Random;
      else invalid("'sim.perturbation' must be none, bump or random");
    }
  }
  if (auto it = j.find("curve"); it != j.end()) {
    reject_unknown(*it, {"points"}, "curve");
    read_opt(*it, "points", cfg.curve.points, int_at, "curve.");
  }
  if (auto it = j.find("demo"); it != j.end()) {
    reject_unknown(*it, {"s0", "k_max"}, "demo");
    read_opt(*it, "s0", cfg.demo.s0, number_at, "demo.");
    read_opt(*it, "k_max", cfg.demo.k_max, int_at, "demo.");
  }
  if (auto it = j.find("output"); it != j.end()) {
    reject_unknown(*it, {"format", "path"}, "output");
    if (auto f = it->find("format"); f != it->end()) {
      if (!f->is_string()) invalid("'output.format' must be a string");
      cfg.output.format = parse_format(f->get<std::string>());
    }
    if (auto path = it->find("path"); path != it->end()) {
      if (!path->is_string()) invalid("'output.path' must be a string");
      cfg.output.path = path->get<std::string>();
    }
  }
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

Json to_json(const RunConfig& cfg) {
  Json j;
  j["a"] = cfg.a;
  j["b"] = cfg.b;
  j["m"] = cfg.m;
  if (cfg.omega) j["omega"] = selector_json(*cfg.omega);
  if (cfg.sigma) j["sigma"] = selector_json(*cfg.sigma);
  if (cfg.branch) j["branch"] = *cfg.branch;

  Json grid = Json::object();
  put(grid, "L", cfg.grid.L);
  if (cfg.grid.n) grid["n"] = *cfg.grid.n;
  if (!grid.empty()) j["grid"] = grid;

  Json sim = Json::object();
  put(sim, "dt", cfg.sim.dt);
  put(sim, "t_end", cfg.sim.t_end);
  if (cfg.sim.N) sim["N"] = *cfg.sim.N;
  put(sim, "L_d", cfg.sim.L_d);
  put(sim, "eps", cfg.sim.eps);
  if (cfg.sim.seed) sim["seed"] = *cfg.sim.seed;
  if (cfg.sim.perturbation) sim["perturbation"] = perturbation_name(*cfg.sim.perturbation);
  if (cfg.sim.sample_every) sim["sample_every"] = *cfg.sim.sample_every;
  if (!sim.empty()) j["sim"] = sim;

  if (cfg.curve.points) j["curve"] = {{"points", *cfg.curve.points}};

  Json demo = Json::object();
  put(demo, "s0", cfg.demo.s0);
  if (cfg.demo.k_max) demo["k_max"] = *cfg.demo.k_max;
  if (!demo.empty()) j["demo"] = demo;

  Json out = Json::object();
  if (cfg.output.format) out["format"] = to_string(*cfg.output.format);
  if (cfg.output.path) out["path"] = *cfg.output.path;
  if (!out.empty()) j["output"] = out;
  return j;
}

ModelParams params_of(const RunConfig& cfg) { return ModelParams::create(cfg.a, cfg.b, cfg.m); }

double resolve_omega(const RunConfig& cfg, const ModelParams& p) {
  if (!cfg.omega) invalid("this command needs 'omega'");
  return resolve(*cfg.omega, p);
}

double resolve_sigma(const RunConfig& cfg, const ModelParams& p) {
  if (!cfg.sigma) invalid("this command needs 'sigma'");
  return resolve(*cfg.sigma, p);
}

// ---------------------------------------------------------------------------
// Reports

Json to_json(const BifurcationReport& rep) {
  Json j;
  j["a"] = rep.params.a();
  j["b"] = rep.params.b();
  j["m"] = rep.params.m();
  j["tau"] = rep.tau;
  j["regime"] = to_string(rep.regime);
  j["tau_star"] = rep.tau_star;
  put(j, "omega_m", rep.omega_m);
  put(j, "omega_M", rep.omega_M);
  put(j, "omega_s", rep.omega_s);
  put(j, "sigma_m", rep.sigma_m);
  put(j, "sigma_M", rep.sigma_M);
  put(j, "sigma_s", rep.sigma_s);
  put(j, "sigma_2", rep.sigma_2);
  return j;
}

BifurcationReport bifurcation_report_from_json(const Json& j) {
  try {
    BifurcationReport rep{ModelParams::create(j.at("a").get<double>(), j.at("b").get<double>(),
                                              j.at("m").get<double>()),
                          j.at("tau").get<double>(),
                          Regime::Supercritical,
                          j.at("tau_star").get<double>(),
                          get_opt(j, "omega_m"),
                          get_opt(j, "omega_M"),
                          get_opt(j, "omega_s"),
                          get_opt(j, "sigma_m"),
                          get_opt(j, "sigma_M"),
                          get_opt(j, "sigma_s"),
                          get_opt(j, "sigma_2")};
    const auto regime = j.at("regime").get<std::string>();
    if (regime == to_string(Regime::Critical)) rep.regime = Regime::Critical;
    else if (regime == to_string(Regime::Subcritical)) rep.regime = Regime::Subcritical;
    else if (regime != to_string(Regime::Supercritical)) invalid("unknown regime '" + regime + "'");
    return rep;
  } catch (const Json::exception& e) {
    invalid(std::string("malformed bifurcation report: ") + e.what());
  }
}

Json to_json(const LevelClassification& lc) {
  Json j;
  j["sigma"] = lc.sigma;
  j["cr_count"] = lc.cr_count;
  j["k_count"] = lc.k_count;
  Json branches = Json::array();
  for (const Branch& br : lc.branches) {
    branches.push_back({{"omega", br.omega},
                        {"energy", br.energy},
                        {"is_minimum", br.is_minimum},
                        {"is_degenerate", br.is_degenerate}});
  }
  j["branches"] = branches;
  return j;
}

LevelClassification level_classification_from_json(const Json& j) {
  try {
    LevelClassification lc{j.at("sigma").get<double>(), j.at("cr_count").get<int>(),
                           j.at("k_count").get<int>(), {}};
    for (const Json& br : j.at("branches")) {
      lc.branches.push_back({br.at("omega").get<double>(), br.at("energy").get<double>(),
                             br.at("is_minimum").get<bool>(), br.at("is_degenerate").get<bool>()});
    }
    return lc;
  } catch (const Json::exception& e) {
    invalid(std::string("malformed level classification: ") + e.what());
  }
}

Json to_json(const HessianReport& rep) {
  return {{"omega", rep.omega},
          {"n", rep.n},
          {"min_eigenvalue", rep.min_eigenvalue},
          {"kernel_overlap", rep.kernel_overlap},
          {"sigma_prime", rep.sigma_prime},
          {"xi_kernel", rep.xi_kernel}};
}

HessianReport hessian_report_from_json(const Json& j) {
  try {
    return {j.at("omega").get<double>(),          j.at("n").get<int>(),
            j.at("min_eigenvalue").get<double>(), j.at("kernel_overlap").get<double>(),
            j.at("sigma_prime").get<double>(),    j.at("xi_kernel").get<double>()};
  } catch (const Json::exception& e) {
    invalid(std::string("malformed hessian report: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Tables

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Table::csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

Json Table::json() const {
  Json j;
  j["columns"] = columns;
  Json data = Json::array();
  for (const auto& row : rows) {
    Json r = Json::array();
    // JSON has no NaN; non-finite cells become null.
    for (double v : row) r.push_back(std::isfinite(v) ? Json(v) : Json(nullptr));
    data.push_back(std::move(r));
  }
  j["rows"] = std::move(data);
  return j;
}

std::string Table::render(Format f) const { return f == Format::Csv ? csv() : dump(json()); }

Table profile_table(const Profile& prof, bool full_line) {
  Table t{{"x", "R", "Rprime"}, {}};
  if (full_line) {
    const FullLine fl = reflect(prof);
    for (Eigen::Index j = 0; j < fl.x.size(); ++j) {
      t.rows.push_back({fl.x(j), fl.values(j), fl.derivative(j)});
    }
  } else {
    for (int j = 0; j <= prof.grid.n(); ++j) {
      t.rows.push_back({prof.grid.x(j), prof.values(j), prof.derivative(j)});
    }
  }
  return t;
}

Table curve_table(const ModelParams& p, int points) {
  if (points < 2) invalid("'curve.points' must be at least 2");
  const FrequencyWindow win = default_window(p);
  std::vector<double> omegas;
  for (int i = 0; i < points; ++i) {
    omegas.push_back(i + 1 == points ? win.omega_hi
                                     : win.omega_lo + win.width() * i / (points - 1));
  }
  // The critical frequencies are added so that the discrete extrema of the
  // sigma column sit exactly on them.
  const BifurcationReport rep = critical_omegas(p);
  for (const auto& w : {rep.omega_m, rep.omega_M, rep.omega_s}) {
    if (w) omegas.push_back(*w);
  }
  std::sort(omegas.begin(), omegas.end());
  omegas.erase(std::unique(omegas.begin(), omegas.end()), omegas.end());

  Table t{{"omega", "sigma", "sigma_prime", "energy"}, {}};
  for (double w : omegas) t.rows.push_back({w, sigma(p, w), sigma_prime(p, w), energy_e(p, w)});
  return t;
}

Table series_table(const TimeSeries& ts) {
  Table t{{"t", "energy", "charge", "orbital_distance", "sup_norm"}, {}};
  for (const auto& r : ts.rows) {
    t.rows.push_back({r.t, r.energy, r.charge, r.orbital_distance, r.sup_norm});
  }
  return t;
}

Table coercivity_table(const CoercivityTable& ct) {
  Table t{{"k", "omega_k", "mass_closed", "mass_quad", "grad_closed", "grad_quad", "energy_closed",
           "energy_quad", "h1_norm2", "energy_limit"},
          {}};
  for (const auto& r : ct.rows) {
    t.rows.push_back({double(r.k), r.omega_k, r.mass_closed, r.mass_quad, r.grad_closed,
                      r.grad_quad, r.energy_closed, r.energy_quad, r.h1_norm2, ct.energy_limit});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Commands

std::string cmd_profile(const RunConfig& cfg, Format f, bool full_line) {
  const ModelParams p = params_of(cfg);
  const double omega = resolve_omega(cfg, p);
  return profile_table(profile_closed_form(p, omega, profile_grid(cfg, p, omega)), full_line)
      .render(f);
}

std::string cmd_curve(const RunConfig& cfg, Format f) {
  return curve_table(params_of(cfg), cfg.curve.points.value_or(401)).render(f);
}

std::string cmd_analyze(const RunConfig& cfg, Format f) {
  require_json(f, "analyze");
  return dump(to_json(analyze(params_of(cfg))));
}

std::string cmd_classify(const RunConfig& cfg, Format f) {
  require_json(f, "classify");
  const ModelParams p = params_of(cfg);
  return dump(to_json(classify(p, resolve_sigma(cfg, p))));
}

std::string cmd_hessian(const RunConfig& cfg, Format f) {
  require_json(f, "hessian");
  const ModelParams p = params_of(cfg);
  const double omega = resolve_omega(cfg, p);
  return dump(to_json(analyze_hessian(p, omega, profile_grid(cfg, p, omega))));
}

SimConfig sim_config_of(const RunConfig& cfg) {
  const ModelParams p = params_of(cfg);
  double omega = 0.0;
  if (cfg.omega) {
    omega = resolve_omega(cfg, p);
  } else if (cfg.sigma) {
    const double level = resolve_sigma(cfg, p);
    if (cfg.branch) {
      const auto inv = branch_inverse(p, level);
      if (*cfg.branch < 0 || *cfg.branch >= int(inv.roots.size())) {
        invalid("'branch' must index one of the " + std::to_string(inv.roots.size()) +
                " frequencies at this level");
      }
      omega = inv.roots[*cfg.branch];
    } else {
      const LevelClassification lc = classify(p, level);
      const auto it = std::find_if(lc.branches.begin(), lc.branches.end(),
                                   [](const Branch& b) { return b.is_minimum; });
      if (it == lc.branches.end()) invalid("no minimum at this level");
      omega = it->omega;
    }
  } else {
    invalid("simulate needs 'omega' or 'sigma'");
  }

  SimConfig sc = default_sim_config(p, omega);
  if (cfg.sim.N || cfg.sim.L_d) {
    sc.grid = PeriodicGrid(cfg.sim.L_d.value_or(sc.grid.half_width()),
                           cfg.sim.N.value_or(sc.grid.n_points()));
    sc.dt = sc.grid.dx() / 2;
  }
  if (cfg.sim.dt) sc.dt = *cfg.sim.dt;
  if (cfg.sim.t_end) sc.t_end = *cfg.sim.t_end;
  if (cfg.sim.sample_every) sc.sample_every = *cfg.sim.sample_every;
  const double eps = cfg.sim.eps.value_or(0.0);
  sc.perturbation = {cfg.sim.perturbation.value_or(eps > 0 ? PerturbationKind::Bump
                                                           : PerturbationKind::None),
                     eps, cfg.sim.seed.value_or(0)};
  sc.validate();
  return sc;
}

std::string render_series(const TimeSeries& ts, Format f) {
  if (f == Format::Csv) return series_table(ts).csv();
  Json j = series_table(ts).json();
  j["dt"] = ts.dt;
  j["max_energy_drift"] = ts.max_energy_drift;
  j["max_charge_drift"] = ts.max_charge_drift;
  if (ts.blowup_time) j["blowup_time"] = *ts.blowup_time;
  return dump(j);
}

std::string cmd_simulate(const RunConfig& cfg, Format f) {
  return render_series(run(sim_config_of(cfg)), f);
}

std::string cmd_coercivity_demo(const RunConfig& cfg, Format f) {
  const ModelParams p = ModelParams::relaxed(cfg.a, cfg.b, cfg.m);
  double s0 = 0.0;
  if (cfg.demo.s0) {
    s0 = *cfg.demo.s0;
  } else {
    // Smaller positive zero of W(s) / s^2 = m^2/2 - a s^2 + b s^4.
    const double disc = cfg.a * cfg.a - 2 * cfg.b * cfg.m * cfg.m;
    if (disc < 0) {
      throw Error(ErrorKind::PreconditionViolation, "W has no positive zero (tau > 1)");
    }
    s0 = std::sqrt((cfg.a - std::sqrt(disc)) / (2 * cfg.b));
  }
  double level = 1.0;
  if (cfg.sigma) {
    const double* v = std::get_if<double>(&*cfg.sigma);
    if (v == nullptr) invalid("coercivity-demo needs a numeric 'sigma'");
    level = *v;
  }
  return coercivity_table(coercivity_demo(p, s0, level, cfg.demo.k_max.value_or(100))).render(f);
}

int exit_code(const Error& e) { return is_numerical_failure(e.kind()) ? 3 : 2; }

}  // namespace nlkg::cli
