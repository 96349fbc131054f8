#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pirm/config.hpp"
#include "pirm/csv.hpp"
#include "pirm/experiments.hpp"
#include "pirm/priors.hpp"
#include "pirm/tuning.hpp"

namespace pirm::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

struct RunOptions {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config, "key=value scenario file")->required();
  cmd->add_option("--out", o.out_dir, "output directory")->required();
  cmd->add_option("--seed", o.seed, "overrides the config seed");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

ExperimentConfig load(const RunOptions& o) {
  auto cfg = load_config(o.config);
  if (o.seed) cfg.scenario.seed = *o.seed;
  return cfg;
}

// Sweeps and surfaces tune the prior-information algorithm.
Scenario tuning_scenario(const ExperimentConfig& cfg) {
  Scenario sc = cfg.scenario;
  if (cfg.all_variants) sc.algorithm = Algorithm::Prior;
  return sc;
}

void warn_divergence(const EnsembleStats& stats, std::ostream& err) {
  if (stats.divergence_warning) {
    err << "warning: " << stats.divergent_runs << " of " << (stats.runs + stats.divergent_runs)
        << " runs diverged and were excluded from the medians\n";
  }
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::vector<double> parse_d_list(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items) {
    if (csv::trim(s).empty()) continue;
    const double d = csv::parse_number(s);
    if (!(d >= 0.0) || !std::isfinite(d)) throw UsageError("--d-list entries must be finite and >= 0");
    out.push_back(d);
  }
  if (out.empty()) throw UsageError("--d-list must be nonempty");
  return out;
}

std::vector<std::uint64_t> parse_iter_list(const std::vector<std::string>& items) {
  std::vector<std::uint64_t> out;
  for (const auto& s : items) {
    const auto t = csv::trim(s);
    if (t.empty()) continue;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) throw UsageError("--iter-list entries must be integers");
    if (v < 6) throw UsageError("--iter-list entries must be >= 6");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--iter-list must be nonempty");
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prior-information Robbins-Monro experiments"};
  app.require_subcommand(1);

  // recommend-c0
  double noise_sd = 0.0;
  std::int64_t planned_iterations = 0;
  std::string coef_file;
  auto* recommend = app.add_subcommand("recommend-c0", "Recommend c0 from the linear tuning rule");
  recommend->add_option("--noise-sd", noise_sd, "observation noise sd d")->required();
  recommend->add_option("--iterations", planned_iterations, "planned number of iterations")->required();
  recommend->add_option("--coef-file", coef_file, "CSV with coef_d,coef_iter,intercept");

  // simulate
  RunOptions sim_opts;
  auto* simulate = app.add_subcommand("simulate", "Median deviation trajectories, writes medians.csv");
  add_run_options(simulate, sim_opts);

  // sweep
  RunOptions sweep_opts;
  double c0_from = 0.02;
  double c0_to = 0.6;
  std::size_t c0_steps = 29;
  auto* sweep = app.add_subcommand("sweep", "Final-iteration median deviation over a c0 grid, writes sweep.csv");
  add_run_options(sweep, sweep_opts);
  sweep->add_option("--c0-from", c0_from)->required();
  sweep->add_option("--c0-to", c0_to)->required();
  sweep->add_option("--c0-steps", c0_steps, "grid intervals; endpoints are included")->required();

  // surface
  RunOptions surface_opts;
  std::vector<std::string> d_list;
  std::vector<std::string> iter_list;
  double s_from = 0.02;
  double s_to = 3.0;
  std::size_t s_steps = 149;
  bool fit = false;
  auto* surface = app.add_subcommand("surface", "Optimal c0 per (d, iteration), writes surface.csv");
  add_run_options(surface, surface_opts);
  surface->add_option("--d-list", d_list, "noise sds, comma separated")->delimiter(',')->required();
  surface->add_option("--iter-list", iter_list, "iterations (>= 6), comma separated")->delimiter(',')->required();
  surface->add_option("--c0-from", s_from);
  surface->add_option("--c0-to", s_to);
  surface->add_option("--c0-steps", s_steps);
  surface->add_flag("--fit", fit, "also fit the linear rule, writes coefficients.csv");

  // kde
  std::string samples_path;
  std::optional<double> bandwidth;
  std::string kde_out;
  auto* kde = app.add_subcommand("kde", "Kernel density prior from samples, writes weight,mean,sigma");
  kde->add_option("--samples", samples_path, "one number per line, # comments")->required();
  kde->add_option("--bandwidth", bandwidth, "kernel sd (default: Silverman's rule)");
  kde->add_option("--out", kde_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (recommend->parsed()) {
      const C0Regression reg = [&] {
        if (coef_file.empty()) return kDefaultC0Regression;
        std::ifstream in(coef_file);
        if (!in) throw UsageError("cannot open coefficient file " + coef_file);
        return read_c0_regression(in);
      }();
      out << fixed4(recommend_c0(reg, noise_sd, planned_iterations)) << "\n";
      return kExitOk;
    }

    if (simulate->parsed()) {
      const auto cfg = load(sim_opts);
      const ExecutionOptions exec{sim_opts.threads};
      std::vector<VariantStats> variants;
      if (cfg.all_variants) {
        variants = run_all_variants(cfg.scenario, exec);
      } else {
        const auto& sc = cfg.scenario;
        variants.push_back({sc.algorithm, sc.start_mode, sc.c0, sc.noise_sd, run_ensemble(sc, exec)});
      }
      auto file = open_output(fs::path(sim_opts.out_dir) / "medians.csv");
      write_medians_csv(file, variants);
      for (const auto& v : variants) warn_divergence(v.stats, err);
      return kExitOk;
    }

    if (sweep->parsed()) {
      const auto cfg = load(sweep_opts);
      if (!(c0_from > 0.0) || !(c0_to > c0_from) || c0_steps < 1) {
        throw UsageError("need 0 < c0-from < c0-to and c0-steps >= 1");
      }
      const auto grid = uniform_grid(c0_from, c0_to, c0_steps);
      const auto result = sweep_c0(tuning_scenario(cfg), grid, ExecutionOptions{sweep_opts.threads});
      auto file = open_output(fs::path(sweep_opts.out_dir) / "sweep.csv");
      write_sweep_csv(file, result);
      out << "argmin c0=" << csv::format_number(result.best_c0)
          << " final_median_abs_deviation=" << csv::format_number(result.best_median) << "\n";
      return kExitOk;
    }

    if (surface->parsed()) {
      const auto cfg = load(surface_opts);
      const auto ds = parse_d_list(d_list);
      const auto its = parse_iter_list(iter_list);
      if (!(s_from > 0.0) || !(s_to > s_from) || s_steps < 1) {
        throw UsageError("need 0 < c0-from < c0-to and c0-steps >= 1");
      }
      const auto grid = uniform_grid(s_from, s_to, s_steps);
      const auto rows =
          optimal_c0_surface(ds, its, grid, tuning_scenario(cfg), ExecutionOptions{surface_opts.threads});
      const fs::path dir(surface_opts.out_dir);
      {
        auto file = open_output(dir / "surface.csv");
        write_c0_observations(file, rows);
      }
      if (fit) {
        auto file = open_output(dir / "coefficients.csv");
        write_c0_fit(file, fit_c0_regression(rows));
      }
      return kExitOk;
    }

    if (kde->parsed()) {
      const auto samples = read_samples(fs::path(samples_path));
      if (samples.empty()) throw UsageError("sample file " + samples_path + " has no samples");
      const auto prior = bandwidth ? kde_from_samples(samples, *bandwidth) : kde_from_samples(samples);
      auto file = open_output(kde_out);
      write_mixture(file, prior);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace pirm::cli
