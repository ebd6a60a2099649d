#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "csv.hpp"
#include "qphonon/cli.hpp"
#include "qphonon/dressed.hpp"
#include "qphonon/dynamics.hpp"
#include "qphonon/gardiner.hpp"

namespace qphonon::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kNormTolerance = 1e-8;
constexpr double kConservationTolerance = 1e-10;
constexpr double kRobertsonTolerance = 1e-9;
constexpr double kStepTolerance = 1e-8;
constexpr double kRabiNumericTolerance = 1e-9;
constexpr double kRabiFockTolerance = 1e-6;

// Residual map with a running pass flag.
class Residuals {
 public:
  void add(const std::string& name, double value, double tolerance) {
    const bool pass = value <= tolerance;
    map_[name] = {{"residual", value}, {"tolerance", tolerance}, {"pass", pass}};
    all_pass_ = all_pass_ && pass;
  }
  void add(const AlgebraReport& report, const std::string& prefix) {
    report.append_to(map_, prefix);
    all_pass_ = all_pass_ && report.all_pass();
  }
  void fail(const std::string& name, const std::string& message) {
    map_[name] = {{"error", message}, {"pass", false}};
    all_pass_ = false;
  }
  bool all_pass() const { return all_pass_; }
  const json& map() const { return map_; }

 private:
  json map_ = json::object();
  bool all_pass_ = true;
};

json sign_json(const SignResolution& s) {
  return {{"s", static_cast<int>(s.sign)},          {"n_small", s.n_small},
          {"n_large", s.n_large},                   {"error_plus", s.error_plus},
          {"error_minus", s.error_minus},           {"ratio_plus", s.ratio_plus},
          {"ratio_minus", s.ratio_minus},           {"separated", s.separated}};
}

json base_report(const RunConfig& config, const SignResolution& sign) {
  return {{"schema_version", kSchemaVersion},
          {"command", config.command},
          {"seed", config.seed},
          {"resolved_sign_s", static_cast<int>(sign.sign)},
          {"sign_resolution", sign_json(sign)},
          {"warnings", json::array()}};
}

void finish_report(CommandResult& result, const Residuals& residuals, Clock::time_point start) {
  result.report["residuals"] = residuals.map();
  result.report["all_pass"] = residuals.all_pass();
  result.report["diagnostics"]["wall_clock_s"] = std::chrono::duration<double>(Clock::now() - start).count();
  if (!residuals.all_pass() && result.exit_code == kExitOk) result.exit_code = kExitNumerical;
}

CsvTable series_table(const ObservableSeries& s) {
  CsvTable table({"t", "re_beta", "im_beta", "mean_ne_exact", "mean_ne_order0", "mean_ne_order1", "var_x1_exact",
                  "var_x2_exact", "var_x1_pert", "var_x2_pert", "product_exact", "product_pert", "re_comm_x1x2",
                  "im_comm_x1x2"});
  for (std::size_t k = 0; k < s.time_grid.size(); ++k) {
    table.add_row({format_number(s.time_grid[k]), format_number(s.pert.beta[k].real()),
                   format_number(s.pert.beta[k].imag()), format_number(s.exact.mean_ne[k]),
                   format_number(s.pert.mean_ne_order0[k]), format_number(s.pert.mean_ne_order1[k]),
                   format_number(s.exact.var_x1[k]), format_number(s.exact.var_x2[k]),
                   format_number(s.pert.var_x1[k]), format_number(s.pert.var_x2[k]),
                   format_number(s.exact.product[k]), format_number(s.pert.product[k]),
                   format_number(s.exact.commutator_x1x2[k].real()), format_number(s.exact.commutator_x1x2[k].imag())});
  }
  return table;
}

json metrics_json(const RunAnalysis& a) {
  return {{"n_total", a.n_total},
          {"eta", a.eta},
          {"e0", a.e0},
          {"e1", a.e1},
          {"var_x1_err", a.var_x1_err},
          {"var_x2_err", a.var_x2_err},
          {"uncertainty_gap", a.uncertainty_gap},
          {"robertson_slack_min", a.robertson_slack_min},
          {"minimization_gap", a.minimization_gap},
          {"commutator_gap", a.commutator_gap},
          {"conservation_error", a.conservation_error},
          {"max_beta2_eta", a.validity},
          {"validity_warning", a.validity_warning},
          {"step", a.step},
          {"halving_change", a.halving_change}};
}

void add_run_residuals(Residuals& r, const RunAnalysis& a, const std::string& prefix) {
  r.add(prefix + "conservation", a.conservation_error, kConservationTolerance);
  r.add(prefix + "robertson", std::max(0.0, -a.robertson_slack_min), kRobertsonTolerance);
  r.add(prefix + "step_halving", a.halving_change, kStepTolerance);
}

void add_validity_warning(json& report, const RunAnalysis& a) {
  if (!a.validity_warning) return;
  report["warnings"].push_back(fmt::format("N = {}: max |beta|^2 eta = {} exceeds {}; not perturbative", a.n_total,
                                           format_number(a.validity), kValidityThreshold));
}

std::vector<std::pair<int, int>> random_pairs(std::uint64_t seed, int count, int max_size) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(1, max_size);
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < count; ++i) {
    const int n = pick(rng);
    const int d = pick(rng);
    out.emplace_back(n, d);
  }
  return out;
}

// Fixed, deliberately unequal frequencies so every Hamiltonian term matters.
double dressed_form_residual(int n, int d) {
  const auto p = DressedParams::with_mu_d(n, d, 0.7, 1.3, 0.4, 0.2);
  const auto sector = FockSector::build(n, d);
  return max_entry_deviation(dressed_hamiltonian(p, sector), dressed_hamiltonian(p, make_dressed(sector)));
}

void check_dressed_pair(Residuals& r, int n, int d) {
  const std::string prefix = fmt::format("dressed_N{}_D{}.", n, d);
  try {
    const auto alg = make_dressed(FockSector::build(n, d));
    r.add(verify_dressed(alg), prefix);
    r.add(prefix + "hamiltonian_forms", dressed_form_residual(n, d), kExactTolerance);
  } catch (const InvariantViolation& e) {
    r.fail(prefix + "construction", e.what());
  }
}

CommandResult cmd_algebra_check(const RunConfig& config, const AlgebraCheckConfig& c, const SignResolution& sign) {
  const auto start = Clock::now();
  CommandResult result;
  result.report = base_report(config, sign);
  Residuals r;
  for (int n : c.n_values) {
    const std::string prefix = fmt::format("N{}.", n);
    try {
      const auto alg = make_algebra(FockSector::build(n));
      r.add(verify_algebra(alg), prefix);
      r.add(prefix + "quadrature_commutator", quadrature_commutator_residual(alg), kExactTolerance);
    } catch (const InvariantViolation& e) {
      r.fail(prefix + "construction", e.what());
    }
  }
  auto pairs = c.dressed_pairs;
  const auto extra = random_pairs(config.seed, c.random_pairs, c.random_max);
  pairs.insert(pairs.end(), extra.begin(), extra.end());
  for (const auto& [n, d] : pairs) check_dressed_pair(r, n, d);
  result.report["diagnostics"]["dressed_pairs"] = pairs;
  finish_report(result, r, start);
  return result;
}

CommandResult cmd_evolve(const RunConfig& config, const EvolveConfig& c, const SignResolution& sign) {
  const auto start = Clock::now();
  CommandResult result;
  result.report = base_report(config, sign);
  Residuals r;

  const ModelParams params{c.n_total, c.omega_e, c.pulse};
  const auto grid = c.time.grid();
  const auto sector = FockSector::build(c.n_total);
  const auto alg = make_algebra(sector);

  EvolveOptions eo;
  eo.max_step = c.max_step;
  QuadratureOptions qo;
  qo.max_step = c.quadrature_step;
  const auto run = evolve(basis_state(sector, 0), params, grid, eo);

  ObservableSeries series;
  series.time_grid = grid;
  series.exact = observables_exact(run.trajectory, alg.phonons());
  series.pert = observables_perturbative(perturbative_solution(params, grid, sign.sign, qo), params.eta());
  auto a = summarize_run(std::move(series), params.eta(), params.n_total);
  a.step = run.trajectory.step;
  a.halving_change = run.halving_change;

  double forms = 0.0;
  const std::size_t stride = std::max<std::size_t>(1, grid.size() / 32);
  for (std::size_t k = 0; k < grid.size(); k += stride) {
    forms = std::max(forms, max_entry_deviation(hamiltonian_at(grid[k], params, sector),
                                                hamiltonian_at(grid[k], params, alg)));
  }

  r.add("norm_drift", run.trajectory.norm_drift, kNormTolerance);
  add_run_residuals(r, a, "");
  r.add("commutator_identity", quadrature_commutator_residual(alg), kExactTolerance);
  r.add("hamiltonian_forms", forms, kExactTolerance);
  add_validity_warning(result.report, a);
  result.report["metrics"] = metrics_json(a);
  result.report["diagnostics"]["halvings"] = run.halvings;

  result.files.push_back({"evolve.csv", series_table(a.series).str()});
  finish_report(result, r, start);
  return result;
}

struct SweepPoint {
  std::optional<RunAnalysis> analysis;
  std::string error;
};

CommandResult cmd_sweep(const RunConfig& config, const SweepConfig& c, const SignResolution& sign, unsigned workers) {
  const auto start = Clock::now();
  CommandResult result;
  result.report = base_report(config, sign);
  Residuals r;

  const auto grid = c.time.grid();
  EvolveOptions eo;
  eo.max_step = c.max_step;
  QuadratureOptions qo;
  qo.max_step = c.quadrature_step;

  std::vector<SweepPoint> points(c.n_values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        const ModelParams params{c.n_values[i], c.omega_e, c.pulse};
        auto a = analyze_run(params, grid, sign.sign, eo, qo);
        a.series = {};  // per-point series are not part of the sweep output
        points[i].analysis = std::move(a);
      } catch (const std::exception& e) {
        points[i].error = e.what();
      }
    }
  };
  const unsigned threads = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(points.size()));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  CsvTable table({"n_total", "eta", "e0", "e1", "var_x1_err", "var_x2_err", "uncertainty_gap", "uncertainty_c",
                  "robertson_slack_min", "minimization_gap", "commutator_gap", "max_beta2_eta", "validity_warning",
                  "ratio_e0", "ratio_e1", "status"});
  json rows = json::array();
  json ratios = json::array();
  const RunAnalysis* previous = nullptr;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int n = c.n_values[i];
    const std::string prefix = fmt::format("N{}.", n);
    if (!points[i].analysis) {
      r.fail(prefix + "run", points[i].error);
      table.add_row({std::to_string(n), format_number(1.0 / n), "", "", "", "", "", "", "", "", "", "", "", "", "",
                     "failed"});
      rows.push_back({{"n_total", n}, {"error", points[i].error}});
      previous = nullptr;
      continue;
    }
    const RunAnalysis& a = *points[i].analysis;
    add_run_residuals(r, a, prefix);
    add_validity_warning(result.report, a);
    std::string ratio_e0;
    std::string ratio_e1;
    if (previous) {
      const double q0 = a.e0 / previous->e0;
      const double q1 = a.e1 / previous->e1;
      ratio_e0 = format_number(q0);
      ratio_e1 = format_number(q1);
      ratios.push_back({{"from", previous->n_total}, {"to", n}, {"ratio_e0", q0}, {"ratio_e1", q1}});
    }
    table.add_row({std::to_string(n), format_number(a.eta), format_number(a.e0), format_number(a.e1),
                   format_number(a.var_x1_err), format_number(a.var_x2_err), format_number(a.uncertainty_gap),
                   format_number(a.uncertainty_gap * n * n), format_number(a.robertson_slack_min),
                   format_number(a.minimization_gap), format_number(a.commutator_gap), format_number(a.validity),
                   a.validity_warning ? "1" : "0", ratio_e0, ratio_e1, "ok"});
    rows.push_back(metrics_json(a));
    previous = &a;
  }
  result.report["points"] = rows;
  result.report["convergence_ratios"] = ratios;
  result.report["diagnostics"]["workers"] = threads;
  result.files.push_back({"sweep.csv", table.str()});
  finish_report(result, r, start);
  return result;
}

CommandResult cmd_dressed_check(const RunConfig& config, const DressedCheckConfig& c, const SignResolution& sign) {
  const auto start = Clock::now();
  CommandResult result;
  result.report = base_report(config, sign);
  Residuals r;

  auto pairs = c.pairs;
  const auto extra = random_pairs(config.seed, c.random_pairs, c.random_max);
  pairs.insert(pairs.end(), extra.begin(), extra.end());
  for (const auto& [n, d] : pairs) check_dressed_pair(r, n, d);
  result.report["diagnostics"]["pairs"] = pairs;

  if (c.evolution) {
    const auto& e = *c.evolution;
    const auto grid = e.time.grid();
    EvolveOptions eo;
    eo.max_step = e.max_step;
    json runs = json::array();
    for (const auto& [n, d] : c.pairs) {
      const std::string prefix = fmt::format("dressed_evolve_N{}_D{}.", n, d);
      try {
        const auto p = DressedParams::with_mu_d(n, d, e.mu_d, e.omega_e, e.omega_g, e.omega_0);
        const auto a = dressed_first_order(p, grid, sign.sign, eo);
        add_run_residuals(r, a, prefix);
        add_validity_warning(result.report, a);
        auto m = metrics_json(a);
        m["delta"] = d;
        runs.push_back(m);
        result.files.push_back({fmt::format("dressed-evolve_N{}_D{}.csv", n, d), series_table(a.series).str()});
      } catch (const std::exception& ex) {
        r.fail(prefix + "run", ex.what());
      }
    }
    result.report["evolutions"] = runs;
  }
  finish_report(result, r, start);
  return result;
}

CommandResult cmd_rabi(const RunConfig& config, const RabiConfig& c, const SignResolution& sign) {
  const auto start = Clock::now();
  CommandResult result;
  result.report = base_report(config, sign);
  Residuals r;

  const auto grid = c.time.grid();
  const int n = c.n_total;
  const auto analytic = rabi_reference(c.g, c.omega_e, c.omega_f, n, grid);
  const auto amplitudes =
      mode_amplitude_evolution(std::sqrt(static_cast<double>(n)), 0.0, c.g, c.omega_e, c.omega_f, grid);

  // Every atom starts in the ground mode; they flop independently under the bilinear drive.
  const ModelParams params{n, c.omega_e, PulseProfile::monochromatic(c.g * std::sqrt(static_cast<double>(n)), c.omega_f)};
  const auto sector = FockSector::build(n);
  const auto initial = basis_state(sector, 0);
  EvolveOptions eo;
  eo.max_step = c.max_step;
  const auto run = evolve(initial, params, grid, eo);
  const auto excited = number_operator(sector, Mode::excited);

  CsvTable table({"t", "beta2_analytic", "alpha_e2_numeric", "beta2_fock"});
  double numeric_err = 0.0;
  double fock_err = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double numeric = std::norm(amplitudes[k].excited);
    const double fock = expectation(run.trajectory.states[k], excited).real();
    numeric_err = std::max(numeric_err, std::abs(numeric - analytic[k]));
    fock_err = std::max(fock_err, std::abs(fock - analytic[k]));
    table.add_row({format_number(grid[k]), format_number(analytic[k]), format_number(numeric), format_number(fock)});
  }
  r.add("analytic_vs_numeric", numeric_err, kRabiNumericTolerance);
  r.add("norm_drift", run.trajectory.norm_drift, kNormTolerance);

  double fraction_err = 0.0;
  double fraction = 0.0;
  double expected = 0.0;
  if (c.g != 0.0) {
    const double omega = rabi_frequency(c.g, c.omega_e, c.omega_f);
    const double t_peak = 0.5 * M_PI / omega;
    expected = c.g * c.g / (omega * omega);
    const auto peak = evolve(initial, params, {0.0, t_peak}, eo);
    fraction = expectation(peak.trajectory.states.back(), excited).real() / n;
    fraction_err = std::abs(fraction - expected);
    result.report["diagnostics"]["t_first_maximum"] = t_peak;
  }
  r.add("fock_peak_fraction", fraction_err, kRabiFockTolerance);
  result.report["metrics"] = {{"peak_fraction_fock", fraction},
                              {"peak_fraction_expected", expected},
                              {"max_fock_vs_analytic", fock_err}};
  result.files.push_back({"rabi.csv", table.str()});
  finish_report(result, r, start);
  return result;
}

std::shared_ptr<spdlog::logger> stderr_logger() {
  auto logger = spdlog::get("qphonon");
  if (!logger) logger = spdlog::stderr_color_mt("qphonon");
  return logger;
}

}  // namespace

CommandResult execute(const RunConfig& config, unsigned workers) {
  const SignResolution& sign = resolved_raise_sign();
  return std::visit(
      [&](const auto& c) -> CommandResult {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, AlgebraCheckConfig>) return cmd_algebra_check(config, c, sign);
        if constexpr (std::is_same_v<T, EvolveConfig>) return cmd_evolve(config, c, sign);
        if constexpr (std::is_same_v<T, SweepConfig>) return cmd_sweep(config, c, sign, workers);
        if constexpr (std::is_same_v<T, DressedCheckConfig>) return cmd_dressed_check(config, c, sign);
        if constexpr (std::is_same_v<T, RabiConfig>) return cmd_rabi(config, c, sign);
      },
      config.params);
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  try {
    spdlog::set_default_logger(stderr_logger());

    CLI::App app{"Number-conserving phonon dynamics of a driven two-mode condensate"};
    std::string command;
    std::string config_path;
    std::string output_dir;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("command", command, "algebra-check | evolve | sweep | dressed-check | rabi")
        ->required()
        ->check(CLI::IsMember({"algebra-check", "evolve", "sweep", "dressed-check", "rabi"}));
    app.add_option("--config", config_path, "JSON configuration")->required();
    app.add_option("--output-dir", output_dir, "Directory for CSV tables and the report");
    app.add_option("--workers", workers, "Sweep worker threads")->check(CLI::PositiveNumber);
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n";
      return kExitConfig;
    }

    RunConfig config;
    try {
      std::ifstream file(config_path);
      if (!file) throw ConfigError("--config", "cannot read " + config_path);
      json document;
      try {
        document = json::parse(file);
      } catch (const json::parse_error& e) {
        throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
      }
      config = parse_config(document);
      if (config.command != command) {
        throw ConfigError("command", "config is for '" + config.command + "' but '" + command + "' was invoked");
      }
    } catch (const ConfigError& e) {
      err << "config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const std::invalid_argument& e) {
      err << "config error: " << e.what() << "\n";
      return kExitConfig;
    }

    const std::filesystem::path dir = !output_dir.empty() ? std::filesystem::path(output_dir)
                                      : config.output_dir ? *config.output_dir
                                                          : std::filesystem::path(".");
    CommandResult result;
    try {
      result = execute(config, workers);
    } catch (const std::invalid_argument& e) {
      err << "config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const std::exception& e) {
      err << "numerical failure: " << e.what() << "\n";
      result.exit_code = kExitNumerical;
      result.report = {{"schema_version", kSchemaVersion},
                       {"command", command},
                       {"resolved_sign_s", static_cast<int>(resolved_raise_sign().sign)},
                       {"error", e.what()}};
    }
    write_outputs(result, command, dir);
    out << fmt::format("{}: {} ({} file(s) in {})\n", command, result.exit_code == kExitOk ? "ok" : "FAILED",
                       result.files.size() + 1, dir.string());
    return result.exit_code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (...) {
    err << "error: unknown failure\n";
    return kExitNumerical;
  }
}

}  // namespace qphonon::cli
