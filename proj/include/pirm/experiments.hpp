#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <boost/random/taus88.hpp>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "pirm/priors.hpp"
#include "pirm/solver.hpp"
#include "pirm/tuning.hpp"

namespace pirm {

enum class Algorithm { Standard, Prior };
enum class StartMode { Prior, Uniform };

std::string_view to_string(Algorithm algorithm);
std::string_view to_string(StartMode mode);

/// Half-width of the uniform start law U(-10, 10).
inline constexpr double kUniformStartBound = 10.0;

/// Randomized linear root-finding benchmark, f(x) = a (x - x_t).
///
/// Per run: a ~ Lognormal(slope_log_mean, slope_log_sd^2),
/// x_t ~ N(prior_mean, prior_sd^2), s1 ~ 10^U(s1_log10_low, s1_log10_high),
/// x_1 from the start law; observations carry N(0, noise_sd^2) noise.
struct Scenario {
  double prior_mean = 0.5;
  double prior_sd = 0.25;
  double slope_log_mean = 0.0;
  double slope_log_sd = 0.5;
  double s1_log10_low = 0.0;
  double s1_log10_high = 1.0;
  double noise_sd = 1.0;
  double c0 = 0.3;
  /// Number of recorded iterates x_1 .. x_N (N - 1 updates).
  std::uint64_t iterations = 20;
  std::uint64_t runs = 20000;
  /// Independent batches of `runs`; the reported median is the mean of batch medians.
  std::uint64_t batches = 1;
  StartMode start_mode = StartMode::Prior;
  Algorithm algorithm = Algorithm::Prior;
  std::uint64_t seed = 0;
  /// Prior used by the prior-information algorithm. Defaults to
  /// N(prior_mean, prior_sd^2), the law the roots are drawn from.
  std::optional<Prior> prior;

  /// Throws std::domain_error when a field is out of range.
  void validate() const;
};

Prior algorithm_prior(const Scenario& scenario);

/// One randomly drawn benchmark instance.
struct Problem {
  double slope = 1.0;
  double root = 0.0;
  double s1 = 1.0;
  double start = 0.0;
};

/// Engine behind every per-run stream. Combined Tausworthe: three words of
/// state, so seeding one per run and role stays cheap.
using RunEngine = boost::random::taus88;

/// Random streams of one run. Each role gets its own engine seeded from
/// (seed, run_index, role), so variants sharing a seed see the same problems
/// and the same noise sequence.
struct RunStreams {
  RunStreams(std::uint64_t seed, std::uint64_t run_index);

  RunEngine problem;
  RunEngine start;
  RunEngine noise;
};

Problem sample_problem(RunStreams& streams, const Scenario& scenario);

struct TrajectoryRecord {
  /// |x_i - x_t| for i = 1 .. iterations; NaN after a divergence.
  std::vector<double> deviations;
  bool divergent = false;
};

/// Runs the scenario's algorithm on a fixed problem, drawing noise from `noise`.
TrajectoryRecord run_problem(const Scenario& scenario, const Prior& prior, const Problem& problem,
                             RunEngine& noise);

TrajectoryRecord run_trajectory(const Scenario& scenario, std::uint64_t run_index);

struct ExecutionOptions {
  /// Worker threads; 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct EnsembleStats {
  std::vector<double> median_abs_dev;
  std::uint64_t runs = 0;  ///< runs entering the medians
  std::uint64_t divergent_runs = 0;
  bool divergence_warning = false;  ///< more than 1% of runs diverged
};

EnsembleStats run_ensemble(const Scenario& scenario, const ExecutionOptions& exec = {});

/// Median with the even-count rule (mean of the two middle order
/// statistics). Reorders `values`; NaN when empty.
double median_of(std::span<double> values);

/// (d_s - d_p) / d_s at a 1-based iteration.
double accuracy_gain(const EnsembleStats& standard, const EnsembleStats& prior, std::uint64_t iteration);

/// `steps + 1` equally spaced points from `from` to `to`, both included.
std::vector<double> uniform_grid(double from, double to, std::size_t steps);

struct SweepRow {
  double c0 = 0.0;
  double final_median = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double best_c0 = 0.0;
  double best_median = 0.0;
};

/// One ensemble per c0 (same seed, so the runs are paired across the grid),
/// scored by the median deviation at the final iteration. Ties go to the
/// earlier grid point.
SweepResult sweep_c0(const Scenario& base, std::span<const double> c0_grid, const ExecutionOptions& exec = {});

/// Optimal c0 for every (d, iteration) cell. Iterations must be >= 6. Each d
/// is simulated once up to the largest requested iteration; the deviation at
/// iteration k does not depend on how many further steps follow, so this
/// matches running a separate sweep per cell.
std::vector<C0Observation> optimal_c0_surface(std::span<const double> d_grid,
                                              std::span<const std::uint64_t> iteration_grid,
                                              std::span<const double> c0_grid, const Scenario& base,
                                              const ExecutionOptions& exec = {});

struct VariantStats {
  Algorithm algorithm = Algorithm::Prior;
  StartMode start_mode = StartMode::Prior;
  double c0 = 0.0;
  double d = 0.0;
  EnsembleStats stats;
};

/// The four algorithm x start-mode combinations of `base`, paired by seed.
std::vector<VariantStats> run_all_variants(const Scenario& base, const ExecutionOptions& exec = {});

/// `iteration,algorithm,start_mode,c0,d,median_abs_deviation,runs`
void write_medians_csv(std::ostream& out, std::span<const VariantStats> variants);

/// `c0,final_median_abs_deviation`
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

}  // namespace pirm
