#include "pirm/experiments.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "pirm/csv.hpp"

namespace pirm {

namespace {

enum class StreamRole : std::uint64_t { Problem = 1, Start = 2, Noise = 3 };

RunEngine make_engine(std::uint64_t seed, std::uint64_t run_index, StreamRole role) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run_index), static_cast<std::uint32_t>(run_index >> 32),
                    static_cast<std::uint32_t>(role)};
  return RunEngine(seq);
}

unsigned resolve_threads(const ExecutionOptions& exec, std::uint64_t work) {
  unsigned t = exec.threads == 0 ? std::thread::hardware_concurrency() : exec.threads;
  t = std::max(t, 1u);
  return static_cast<unsigned>(std::min<std::uint64_t>(t, std::max<std::uint64_t>(work, 1)));
}

// Calls body(run_index) for every run in [0, total). Results must be written
// to per-run slots, which keeps the output independent of the schedule.
template <typename Body>
void parallel_runs(std::uint64_t total, const ExecutionOptions& exec, Body&& body) {
  const unsigned workers = resolve_threads(exec, total);
  if (workers == 1) {
    for (std::uint64_t r = 0; r < total; ++r) body(r);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = total * w / workers;
    const std::uint64_t end = total * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        for (std::uint64_t r = begin; r < end; ++r) body(r);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  return algorithm == Algorithm::Standard ? "standard" : "prior";
}

std::string_view to_string(StartMode mode) { return mode == StartMode::Prior ? "prior" : "uniform"; }

void Scenario::validate() const {
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(prior_mean) || !finite(slope_log_mean)) throw std::domain_error("scenario: means must be finite");
  if (!(prior_sd > 0.0) || !finite(prior_sd)) throw std::domain_error("scenario: prior_sd must be positive");
  if (!(slope_log_sd > 0.0) || !finite(slope_log_sd)) {
    throw std::domain_error("scenario: slope_log_sd must be positive");
  }
  if (!finite(s1_log10_low) || !finite(s1_log10_high) || s1_log10_low > s1_log10_high) {
    throw std::domain_error("scenario: need s1_log10_low <= s1_log10_high");
  }
  if (!(noise_sd >= 0.0) || !finite(noise_sd)) throw std::domain_error("scenario: noise_sd must be >= 0");
  if (!(c0 > 0.0) || !finite(c0)) throw std::domain_error("scenario: c0 must be positive");
  if (iterations < 1) throw std::domain_error("scenario: iterations must be >= 1");
  if (runs < 1) throw std::domain_error("scenario: runs must be >= 1");
  if (batches < 1) throw std::domain_error("scenario: batches must be >= 1");
}

Prior algorithm_prior(const Scenario& scenario) {
  if (scenario.prior) return *scenario.prior;
  return GaussianPrior(scenario.prior_mean, scenario.prior_sd);
}

RunStreams::RunStreams(std::uint64_t seed, std::uint64_t run_index)
    : problem(make_engine(seed, run_index, StreamRole::Problem)),
      start(make_engine(seed, run_index, StreamRole::Start)),
      noise(make_engine(seed, run_index, StreamRole::Noise)) {}

Problem sample_problem(RunStreams& streams, const Scenario& scenario) {
  Problem p;
  p.slope = std::lognormal_distribution<double>(scenario.slope_log_mean, scenario.slope_log_sd)(streams.problem);
  p.root = std::normal_distribution<double>(scenario.prior_mean, scenario.prior_sd)(streams.problem);
  const double log_s1 =
      std::uniform_real_distribution<double>(scenario.s1_log10_low, scenario.s1_log10_high)(streams.problem);
  p.s1 = std::pow(10.0, log_s1);
  if (scenario.start_mode == StartMode::Prior) {
    p.start = std::normal_distribution<double>(scenario.prior_mean, scenario.prior_sd)(streams.start);
  } else {
    p.start = std::uniform_real_distribution<double>(-kUniformStartBound, kUniformStartBound)(streams.start);
  }
  return p;
}

TrajectoryRecord run_problem(const Scenario& scenario, const Prior& prior, const Problem& problem,
                             RunEngine& noise) {
  const StepSchedule step(problem.s1);
  const SpreadSchedule spread_sched(scenario.c0);
  std::normal_distribution<double> unit_noise(0.0, 1.0);

  TrajectoryRecord rec;
  rec.deviations.reserve(scenario.iterations);
  RmState state{1, problem.start};
  rec.deviations.push_back(std::abs(state.x - problem.root));
  while (rec.deviations.size() < scenario.iterations) {
    // y_t = 0 and f(x) = a (x - x_t), so x_t is the root.
    const Observation obs{problem.slope * (state.x - problem.root) + scenario.noise_sd * unit_noise(noise), 0.0};
    state = scenario.algorithm == Algorithm::Standard
                ? standard_rm_step(state, obs, step)
                : prior_rm_step(state, obs, step, spread_sched, prior);
    const double dev = std::abs(state.x - problem.root);
    if (!std::isfinite(dev)) {
      rec.divergent = true;
      rec.deviations.resize(scenario.iterations, std::numeric_limits<double>::quiet_NaN());
      break;
    }
    rec.deviations.push_back(dev);
  }
  return rec;
}

TrajectoryRecord run_trajectory(const Scenario& scenario, std::uint64_t run_index) {
  scenario.validate();
  RunStreams streams(scenario.seed, run_index);
  const Problem problem = sample_problem(streams, scenario);
  return run_problem(scenario, algorithm_prior(scenario), problem, streams.noise);
}

double median_of(std::span<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

EnsembleStats run_ensemble(const Scenario& scenario, const ExecutionOptions& exec) {
  scenario.validate();
  const Prior prior = algorithm_prior(scenario);
  const std::uint64_t per_batch = scenario.runs;
  const std::uint64_t total = per_batch * scenario.batches;
  const std::size_t n_iter = scenario.iterations;

  std::vector<double> deviations(total * n_iter);
  std::vector<char> divergent(total, 0);
  parallel_runs(total, exec, [&](std::uint64_t r) {
    RunStreams streams(scenario.seed, r);
    const Problem problem = sample_problem(streams, scenario);
    const auto rec = run_problem(scenario, prior, problem, streams.noise);
    std::copy(rec.deviations.begin(), rec.deviations.end(), deviations.begin() + static_cast<std::ptrdiff_t>(r * n_iter));
    divergent[r] = rec.divergent ? 1 : 0;
  });

  EnsembleStats stats;
  stats.divergent_runs = static_cast<std::uint64_t>(std::count(divergent.begin(), divergent.end(), 1));
  stats.runs = total - stats.divergent_runs;
  stats.divergence_warning = static_cast<double>(stats.divergent_runs) > 0.01 * static_cast<double>(total);
  stats.median_abs_dev.assign(n_iter, 0.0);

  std::vector<double> column;
  column.reserve(per_batch);
  for (std::size_t k = 0; k < n_iter; ++k) {
    double sum = 0.0;
    std::uint64_t used_batches = 0;
    for (std::uint64_t b = 0; b < scenario.batches; ++b) {
      column.clear();
      for (std::uint64_t r = b * per_batch; r < (b + 1) * per_batch; ++r) {
        if (!divergent[r]) column.push_back(deviations[r * n_iter + k]);
      }
      if (column.empty()) continue;
      sum += median_of(column);
      ++used_batches;
    }
    stats.median_abs_dev[k] =
        used_batches == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(used_batches);
  }
  return stats;
}

double accuracy_gain(const EnsembleStats& standard, const EnsembleStats& prior, std::uint64_t iteration) {
  if (standard.median_abs_dev.size() != prior.median_abs_dev.size()) {
    throw std::domain_error("accuracy_gain: ensembles have different iteration counts");
  }
  if (iteration < 1 || iteration > standard.median_abs_dev.size()) {
    throw std::domain_error("accuracy_gain: iteration out of range");
  }
  const double ds = standard.median_abs_dev[iteration - 1];
  const double dp = prior.median_abs_dev[iteration - 1];
  if (!(ds > 0.0)) throw std::domain_error("accuracy_gain: standard median deviation is zero");
  return (ds - dp) / ds;
}

std::vector<double> uniform_grid(double from, double to, std::size_t steps) {
  if (steps < 1) throw std::domain_error("uniform_grid: need at least one step");
  if (!(to > from)) throw std::domain_error("uniform_grid: need from < to");
  std::vector<double> grid(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double raw = k == steps ? to : from + (to - from) * static_cast<double>(k) / static_cast<double>(steps);
    // Snap to 15 significant digits so 0.02 + 0.02 prints as 0.04.
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), raw, std::chars_format::general, 15);
    grid[k] = csv::parse_number(std::string_view(buf.data(), static_cast<std::size_t>(res.ptr - buf.data())));
  }
  return grid;
}

SweepResult sweep_c0(const Scenario& base, std::span<const double> c0_grid, const ExecutionOptions& exec) {
  if (c0_grid.empty()) throw std::domain_error("sweep_c0: empty c0 grid");
  SweepResult out;
  Scenario sc = base;
  for (double c0 : c0_grid) {
    sc.c0 = c0;
    const auto stats = run_ensemble(sc, exec);
    const double final_median = stats.median_abs_dev.back();
    out.rows.push_back({c0, final_median});
    if (out.rows.size() == 1 || final_median < out.best_median) {
      out.best_c0 = c0;
      out.best_median = final_median;
    }
  }
  return out;
}

std::vector<C0Observation> optimal_c0_surface(std::span<const double> d_grid,
                                              std::span<const std::uint64_t> iteration_grid,
                                              std::span<const double> c0_grid, const Scenario& base,
                                              const ExecutionOptions& exec) {
  if (d_grid.empty() || iteration_grid.empty() || c0_grid.empty()) {
    throw std::domain_error("optimal_c0_surface: grids must be nonempty");
  }
  for (auto it : iteration_grid) {
    if (it < 6) throw std::domain_error("optimal_c0_surface: iterations must be >= 6");
  }
  const std::uint64_t horizon = *std::max_element(iteration_grid.begin(), iteration_grid.end());

  std::vector<C0Observation> rows;
  for (double d : d_grid) {
    Scenario sc = base;
    sc.noise_sd = d;
    sc.iterations = horizon;
    std::vector<std::vector<double>> medians;
    for (double c0 : c0_grid) {
      sc.c0 = c0;
      medians.push_back(run_ensemble(sc, exec).median_abs_dev);
    }
    for (auto it : iteration_grid) {
      std::size_t best = 0;
      for (std::size_t g = 1; g < c0_grid.size(); ++g) {
        if (medians[g][it - 1] < medians[best][it - 1]) best = g;
      }
      rows.push_back({d, static_cast<double>(it), c0_grid[best]});
    }
  }
  return rows;
}

std::vector<VariantStats> run_all_variants(const Scenario& base, const ExecutionOptions& exec) {
  std::vector<VariantStats> out;
  for (auto start : {StartMode::Prior, StartMode::Uniform}) {
    for (auto algorithm : {Algorithm::Standard, Algorithm::Prior}) {
      Scenario sc = base;
      sc.start_mode = start;
      sc.algorithm = algorithm;
      out.push_back({algorithm, start, sc.c0, sc.noise_sd, run_ensemble(sc, exec)});
    }
  }
  return out;
}

void write_medians_csv(std::ostream& out, std::span<const VariantStats> variants) {
  out << "iteration,algorithm,start_mode,c0,d,median_abs_deviation,runs\n";
  for (const auto& v : variants) {
    const std::string c0 = csv::format_number(v.c0);
    const std::string d = csv::format_number(v.d);
    for (std::size_t k = 0; k < v.stats.median_abs_dev.size(); ++k) {
      out << (k + 1) << ',' << to_string(v.algorithm) << ',' << to_string(v.start_mode) << ',' << c0 << ',' << d
          << ',' << csv::format_number(v.stats.median_abs_dev[k]) << ',' << v.stats.runs << '\n';
    }
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "c0,final_median_abs_deviation\n";
  for (const auto& row : sweep.rows) {
    out << csv::format_number(row.c0) << ',' << csv::format_number(row.final_median) << '\n';
  }
}

}  // namespace pirm
