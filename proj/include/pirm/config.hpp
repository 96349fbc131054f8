#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "pirm/experiments.hpp"

namespace pirm {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed experiment configuration.
struct ExperimentConfig {
  Scenario scenario;
  /// `algorithm=all`: run the four algorithm x start-mode variants.
  bool all_variants = false;
};

/// Flat `key = value` text, one pair per line, `#` starts a comment line.
///
/// Scenario keys: prior_mean, prior_sd, slope_log_mean, slope_log_sd,
/// s1_log10_low, s1_log10_high, noise_sd, c0, iterations, runs, batches,
/// start_mode (prior|uniform), algorithm (standard|prior|all), seed.
///
/// Prior keys: prior.kind (gaussian|mixture|kde|uniform|tabulated), then
///   gaussian:  prior.mu, prior.sigma (default prior_mean, prior_sd)
///   mixture:   prior.mixture_path (`weight,mean,sigma` CSV)
///   kde:       prior.samples_path, prior.bandwidth (default Silverman)
///   tabulated: prior.grid_path (`x,log_density` CSV), prior.J (default certified)
///
/// Unknown or repeated keys, and keys that do not belong to the selected
/// prior kind, raise ConfigError. Relative paths resolve against `base_dir`.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace pirm
