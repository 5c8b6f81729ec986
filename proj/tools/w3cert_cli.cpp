// w3cert command-line front end.
//
// Exit codes: 0 success, 1 usage or input error, 2 solver non-convergence.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "w3cert/analytic.hpp"
#include "w3cert/devices.hpp"
#include "w3cert/extraction.hpp"
#include "w3cert/moments.hpp"
#include "w3cert/sdpa.hpp"
#include "w3cert/sdpsolve.hpp"
#include "w3cert/tilted.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace w3cert;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoConvergence = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw UsageError("bad number in epsilon grid: '" + s + "'");
    }
    if (used != s.size()) throw UsageError("bad number in epsilon grid: '" + s + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("epsilon range must be start:stop:step");
    const double a = to_double(parts[0]);
    const double b = to_double(parts[1]);
    const double h = to_double(parts[2]);
    if (!(h > 0.0)) throw UsageError("epsilon step must be positive");
    if (b < a) throw UsageError("epsilon range is empty");
    const auto n = static_cast<long>(std::floor((b - a) / h + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * h);
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(to_double(p));
  }
  if (out.empty()) throw UsageError("epsilon grid is empty");
  for (double e : out) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw UsageError("epsilon values must be finite and >= 0");
  }
  return out;
}

fs::path resolve_output(const std::string& name) {
  fs::path p(name);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("W3CERT_OUTPUT_DIR"); dir != nullptr && *dir != '\0') return fs::path(dir) / p;
  }
  return p;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write to " + path.string() + " failed");
}

Realization w3_with_visibility(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw UsageError("visibility must lie in [0, 1]");
  if (v == 1.0) return ideal_w3_realization();
  return qubit_w3_realization(depolarize(w3_state(), v));
}

// Key/value report printed as "key,value" lines or one JSON object.
void emit(const ordered_json& report, bool json) {
  if (json) {
    std::cout << report.dump(2) << '\n';
    return;
  }
  for (const auto& [k, v] : report.items()) {
    std::cout << k << ',';
    if (v.is_number_float()) {
      std::cout << num(v.get<double>());
    } else if (v.is_string()) {
      std::cout << v.get<std::string>();
    } else {
      std::cout << v.dump();
    }
    std::cout << '\n';
  }
}

struct SolverFlags {
  std::string method = "ipm";
  int max_iterations = 0;
  double tolerance = 0.0;
  bool no_triples = false;
  bool verbose = false;

  void add(CLI::App* app) {
    app->add_option("--method", method, "ipm (interior point) or admm")->check(CLI::IsMember({"ipm", "admm"}));
    app->add_option("--max-iter", max_iterations, "iteration cap (0: method default)")->check(CLI::NonNegativeNumber);
    app->add_option("--tol", tolerance, "convergence tolerance (0: method default)")->check(CLI::NonNegativeNumber);
    app->add_flag("--no-triples", no_triples, "constrain only the 13 correlators");
    app->add_flag("--verbose", verbose, "per-iteration trace on stderr");
  }

  [[nodiscard]] SolverSettings settings() const {
    SolverSettings s;
    s.method = method == "admm" ? SolverMethod::Admm : SolverMethod::InteriorPoint;
    s.verbose = verbose;
    if (s.method == SolverMethod::Admm) {
      if (max_iterations > 0) s.max_iterations = max_iterations;
      if (tolerance > 0.0) s.tolerance = tolerance;
    } else {
      if (max_iterations > 0) s.ipm_max_iterations = max_iterations;
      if (tolerance > 0.0) s.ipm_tolerance = tolerance;
    }
    return s;
  }

  [[nodiscard]] AssembleOptions assemble() const { return {.include_triples = !no_triples}; }
};

std::vector<Preset> presets_from(const std::string& name) {
  if (name == "both") return {Preset::Small, Preset::Level2};
  return {parse_preset(name)};
}

// ---- stats ---------------------------------------------------------------

int run_stats(double visibility, std::int64_t shots, std::uint64_t seed, bool json) {
  const auto r = w3_with_visibility(visibility);
  const auto t = shots > 0 ? sample_statistics(r, shots, seed) : statistics(r);
  const auto ideal = ideal_statistics();
  if (json) {
    std::cout << to_json(t).dump(2) << '\n';
    return kExitOk;
  }
  std::cout << "name,value,ideal,deviation\n";
  const auto& specs = correlator_specs();
  for (std::size_t i = 0; i < kCorrelatorCount; ++i) {
    std::cout << specs[i].name << ',' << num(t.correlators[i]) << ',' << num(ideal.correlators[i]) << ','
              << num(t.correlators[i] - ideal.correlators[i]) << '\n';
  }
  for (std::size_t i = 0; i < kTripleCount; ++i) {
    std::cout << triple_name(i) << ',' << num(t.triples[i]) << ',' << num(ideal.triples[i]) << ','
              << num(t.triples[i] - ideal.triples[i]) << '\n';
  }
  return kExitOk;
}

// ---- extract -------------------------------------------------------------

int run_extract(double visibility, bool json) {
  const auto r = w3_with_visibility(visibility);
  const auto out = isometry_output(r);
  const auto jd = junk_decomposition(out);
  ordered_json rep;
  rep["visibility"] = visibility;
  rep["fidelity"] = swap_fidelity(out, w3_state());
  rep["norm_distance"] = jd.residual;
  rep["optimal_norm_distance"] = optimal_norm_distance(out, w3_state());
  rep["junk_norm"] = jd.junk_norm;
  rep["degenerate_junk"] = jd.degenerate;
  emit(rep, json);
  return kExitOk;
}

// ---- bound analytic ------------------------------------------------------

int run_bound_analytic(double eps, double visibility, bool json) {
  DeviationVector dev;
  ordered_json rep;
  if (visibility >= 0.0) {
    dev = deviations(statistics(w3_with_visibility(visibility)));
    rep["visibility"] = visibility;
  } else {
    if (!(eps >= 0.0)) throw UsageError("--eps must be >= 0");
    dev = DeviationVector::uniform(eps);
  }
  const auto b = delta_chain(dev);
  rep["max_abs_eps"] = dev.max_abs();
  rep["delta0"] = b.delta0;
  for (std::size_t i = 1; i <= 8; ++i) rep["delta" + std::to_string(i)] = b.d(i);
  rep["residual_mass"] = b.residual_mass;
  rep["general_raw"] = b.general_raw;
  rep["general"] = b.general;
  rep["saturated"] = b.saturated;
  rep["closed_raw"] = b.closed_raw;
  rep["closed"] = b.closed;
  rep["closed_threshold"] = closed_form_threshold();
  emit(rep, json);
  return kExitOk;
}

// ---- bound sdp / sweep ---------------------------------------------------

struct SweepRow {
  double epsilon = 0.0;
  Preset preset = Preset::Level2;
  SdpSolution sol;
  double seconds = 0.0;
};

SweepRow solve_point(const std::shared_ptr<const MomentMatrixTemplate>& t, Preset preset, double eps,
                     const SolverFlags& flags) {
  const auto start = std::chrono::steady_clock::now();
  SweepRow row;
  row.epsilon = eps;
  row.preset = preset;
  row.sol = solve(assemble_sdp(t, eps, flags.assemble()), flags.settings());
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

int run_bound_sdp(const std::string& preset_name_arg, double eps, const SolverFlags& flags, bool json) {
  if (!(eps >= 0.0)) throw UsageError("--eps must be >= 0");
  const auto preset = parse_preset(preset_name_arg);
  const auto t = std::make_shared<const MomentMatrixTemplate>(preset_words(preset));
  const auto row = solve_point(t, preset, eps, flags);
  ordered_json rep;
  rep["preset"] = std::string(preset_name(preset));
  rep["epsilon"] = eps;
  rep["matrix_size"] = t->size();
  rep["variables"] = t->variable_count();
  rep["status"] = status_name(row.sol.status);
  rep["fidelity_lb"] = row.sol.bound;
  rep["primal_objective"] = row.sol.primal_objective;
  rep["primal_residual"] = row.sol.primal_residual;
  rep["dual_residual"] = row.sol.dual_residual;
  rep["iterations"] = row.sol.iterations;
  rep["seconds"] = row.seconds;
  emit(rep, json);
  return row.sol.status == SolveStatus::Converged ? kExitOk : kExitNoConvergence;
}

std::string gnuplot_script(const std::string& csv_name, const std::vector<Preset>& presets) {
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set key autotitle columnhead\n"
    << "set xlabel 'epsilon'\n"
    << "set ylabel 'fidelity lower bound'\n"
    << "set yrange [0:1.02]\n"
    << "plot ";
  for (std::size_t i = 0; i < presets.size(); ++i) {
    const std::string name(preset_name(presets[i]));
    if (i > 0) s << ", \\\n     ";
    s << "'" << csv_name << "' using 1:(strcol(2) eq '" << name << "' ? $3 : NaN) with linespoints title '" << name
      << "'";
  }
  s << '\n';
  return s.str();
}

int run_sweep(const std::string& preset_arg, const std::string& grid_text, unsigned jobs, const std::string& output,
              const std::string& gnuplot, bool no_timing, const SolverFlags& flags) {
  const auto grid = parse_grid(grid_text);
  const auto presets = presets_from(preset_arg);

  struct Task {
    std::shared_ptr<const MomentMatrixTemplate> t;
    Preset preset;
    double eps;
  };
  std::vector<Task> tasks;
  for (auto p : presets) {
    auto t = std::make_shared<const MomentMatrixTemplate>(preset_words(p));
    for (double e : grid) tasks.push_back({t, p, e});
  }

  std::vector<SweepRow> rows(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        rows[i] = solve_point(tasks[i].t, tasks[i].preset, tasks[i].eps, flags);
        if (flags.verbose) {
          std::lock_guard lock(log_mutex);
          std::cerr << preset_name(rows[i].preset) << " eps=" << num(rows[i].epsilon) << " bound=" << num(rows[i].sol.bound)
                    << " " << status_name(rows[i].sol.status) << '\n';
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, tasks.size()));
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // Rows come out in task order: preset, then epsilon as given.
  std::ostringstream csv;
  csv << "epsilon,preset,fidelity_lb,primal_residual,dual_residual,iterations,seconds\n";
  bool all_converged = true;
  for (const auto& r : rows) {
    all_converged = all_converged && r.sol.status == SolveStatus::Converged;
    csv << num(r.epsilon) << ',' << preset_name(r.preset) << ',' << num(r.sol.bound) << ','
        << num(r.sol.primal_residual) << ',' << num(r.sol.dual_residual) << ',' << r.sol.iterations << ','
        << num(no_timing ? 0.0 : r.seconds) << '\n';
  }

  std::string out_name = output;
  if (out_name.empty() && std::getenv("W3CERT_OUTPUT_DIR") != nullptr) out_name = "sweep.csv";
  if (out_name.empty() || out_name == "-") {
    std::cout << csv.str();
  } else {
    const auto path = resolve_output(out_name);
    write_file(path, csv.str());
    std::cerr << "wrote " << path.string() << '\n';
  }
  if (!gnuplot.empty()) {
    const std::string csv_ref = out_name.empty() || out_name == "-" ? "sweep.csv" : fs::path(out_name).filename().string();
    write_file(resolve_output(gnuplot), gnuplot_script(csv_ref, presets));
  }
  if (!all_converged) {
    std::cerr << "error: at least one sweep point did not converge\n";
    return kExitNoConvergence;
  }
  return kExitOk;
}

// ---- tilted --------------------------------------------------------------

int run_tilted(double gamma, double visibility, int grid, bool json) {
  if (gamma == 0.0 || !std::isfinite(gamma)) throw UsageError("--gamma must be a nonzero finite real");
  if (!(visibility >= 0.0 && visibility <= 1.0)) throw UsageError("visibility must lie in [0, 1]");
  const auto p = tilted_params(gamma);
  const auto oracle = tilted_bell_max(p.alpha, grid);
  const auto ideal_r = family_realization(gamma);
  const auto cond = conditional_statistics(ideal_r, p.alpha);
  const auto cond_ideal = ideal_conditional_statistics(gamma);
  const auto r = visibility == 1.0 ? ideal_r : family_realization(gamma, depolarize(psi_gamma(gamma), visibility));

  ordered_json rep;
  rep["gamma"] = gamma;
  rep["alpha"] = p.alpha;
  if (std::abs(gamma) != 1.0) {
    rep["alpha_alternative_form"] = alpha_alternative(gamma);
  } else {
    rep["alpha_alternative_form"] = "undefined";
  }
  rep["mu"] = p.mu;
  rep["beta_star"] = p.beta_star;
  rep["local_bound"] = 2.0 + std::abs(p.alpha);
  rep["oracle_max"] = oracle.value;
  rep["oracle_gap"] = oracle.value - p.beta_star;
  rep["p10"] = cond.p10;
  rep["p01"] = cond.p01;
  rep["p00"] = cond.p00;
  rep["bell_given_a0"] = cond.bell_a;
  rep["bell_given_b0"] = cond.bell_b;
  rep["bell_expected"] = cond_ideal.bell_a;
  rep["visibility"] = visibility;
  rep["extraction_fidelity"] = family_extraction(r, gamma);
  emit(rep, json);
  return kExitOk;
}

// ---- export sdpa ---------------------------------------------------------

int run_export(const std::string& preset_arg, double eps, const std::string& output, const SolverFlags& flags) {
  if (!(eps >= 0.0)) throw UsageError("--eps must be >= 0");
  const auto preset = parse_preset(preset_arg);
  const auto t = std::make_shared<const MomentMatrixTemplate>(preset_words(preset));
  const auto text = export_sdpa(assemble_sdp(t, eps, flags.assemble()));
  if (output == "-") {
    std::cout << text;
  } else {
    const auto path = resolve_output(output);
    write_file(path, text);
    std::cerr << "wrote " << path.string() << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Device-independent W-state certification: statistics, bounds and sweeps"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json = false;
  app.add_flag("--json", json, "print reports as JSON");

  int code = kExitOk;
  std::function<int()> action;

  double visibility = 1.0;
  std::int64_t shots = 0;
  std::uint64_t seed = 1;
  auto* stats = app.add_subcommand("stats", "correlator and projector-triple table");
  stats->add_option("-v,--visibility", visibility, "depolarizing visibility of |W3>")->check(CLI::Range(0.0, 1.0));
  stats->add_option("--shots", shots, "finite-shot estimate with this many shots per setting (0: exact)")
      ->check(CLI::NonNegativeNumber);
  stats->add_option("--seed", seed, "sampler seed");
  stats->callback([&] { action = [&] { return run_stats(visibility, shots, seed, json); }; });

  auto* extract = app.add_subcommand("extract", "swap-isometry fidelity and norm distance");
  extract->add_option("-v,--visibility", visibility, "depolarizing visibility of |W3>")->check(CLI::Range(0.0, 1.0));
  extract->callback([&] { action = [&] { return run_extract(visibility, json); }; });

  auto* bound = app.add_subcommand("bound", "robustness bounds");
  bound->require_subcommand(1);
  double eps = 0.0;
  double bound_visibility = -1.0;
  auto* analytic = bound->add_subcommand("analytic", "analytic norm bound");
  auto* eps_opt = analytic->add_option("--eps", eps, "uniform deviation |eps_i|");
  analytic->add_option("-v,--visibility", bound_visibility, "take deviations from a depolarized |W3>")
      ->check(CLI::Range(0.0, 1.0))
      ->excludes(eps_opt);
  analytic->callback([&] { action = [&] { return run_bound_analytic(eps, bound_visibility, json); }; });

  std::string preset = "level2";
  SolverFlags flags;
  auto* sdp = bound->add_subcommand("sdp", "fidelity lower bound at one epsilon");
  sdp->add_option("--preset", preset, "small or level2")->check(CLI::IsMember({"small", "level2"}));
  sdp->add_option("--eps", eps, "two-sided statistic tolerance");
  flags.add(sdp);
  sdp->callback([&] { action = [&] { return run_bound_sdp(preset, eps, flags, json); }; });

  std::string grid = "0:0.05:0.005";
  unsigned jobs = 0;
  std::string output;
  std::string gnuplot;
  bool no_timing = false;
  auto* sweep = app.add_subcommand("sweep", "CSV of epsilon vs fidelity lower bound");
  sweep->add_option("--preset", preset, "small, level2 or both")->check(CLI::IsMember({"small", "level2", "both"}));
  sweep->add_option("--eps", grid, "start:stop:step (inclusive) or a comma list");
  sweep->add_option("-j,--jobs", jobs, "worker threads (0: number of cores)");
  sweep->add_option("-o,--output", output, "CSV path ('-' for stdout); relative paths go under $W3CERT_OUTPUT_DIR");
  sweep->add_option("--gnuplot", gnuplot, "also write a gnuplot script to this path");
  sweep->add_flag("--no-timing", no_timing, "write 0 in the seconds column so reruns are byte-identical");
  flags.add(sweep);
  sweep->callback(
      [&] { action = [&] { return run_sweep(preset, grid, jobs, output, gnuplot, no_timing, flags); }; });

  double gamma = 1.0;
  int oracle_grid = 48;
  double tilted_visibility = 1.0;
  auto* tilted = app.add_subcommand("tilted", "tilted-CHSH family report for one gamma");
  tilted->add_option("--gamma", gamma, "amplitude ratio (nonzero)")->required();
  tilted->add_option("--grid", oracle_grid, "angle grid per axis for the Bell oracle")->check(CLI::Range(4, 2000));
  tilted->add_option("-v,--visibility", tilted_visibility, "depolarizing visibility for the extraction")
      ->check(CLI::Range(0.0, 1.0));
  tilted->callback([&] { action = [&] { return run_tilted(gamma, tilted_visibility, oracle_grid, json); }; });

  auto* exp = app.add_subcommand("export", "write problem files");
  exp->require_subcommand(1);
  std::string sdpa_out;
  auto* sdpa = exp->add_subcommand("sdpa", "SDPA sparse file of the relaxation");
  sdpa->add_option("--preset", preset, "small or level2")->check(CLI::IsMember({"small", "level2"}));
  sdpa->add_option("--eps", eps, "two-sided statistic tolerance");
  sdpa->add_option("-o,--output", sdpa_out, "output path ('-' for stdout)")->required();
  flags.add(sdpa);
  sdpa->callback([&] { action = [&] { return run_export(preset, eps, sdpa_out, flags); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    code = action();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return code;
}
