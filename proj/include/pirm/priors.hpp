#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace pirm {

/// Normal prior N(mean, sd^2) over the root location.
class GaussianPrior {
 public:
  GaussianPrior(double mean, double sd);

  double mean() const noexcept { return mean_; }
  double sd() const noexcept { return sd_; }

 private:
  double mean_;
  double sd_;
};

struct MixtureComponent {
  double weight;
  double mean;
};

/// Finite mixture of normals sharing one standard deviation.
///
/// Weights must be positive and sum to one within 1e-12. A kernel density
/// estimate with a normal kernel is the equal-weight special case.
class GaussianMixturePrior {
 public:
  GaussianMixturePrior(std::vector<MixtureComponent> components, double sigma);

  std::span<const MixtureComponent> components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }
  double sigma() const noexcept { return sigma_; }
  double min_mean() const noexcept { return min_mean_; }
  double max_mean() const noexcept { return max_mean_; }

 private:
  std::vector<MixtureComponent> components_;
  double sigma_;
  double min_mean_;
  double max_mean_;
};

/// Improper flat prior. Its log-density is 0 everywhere by convention.
struct UniformPrior {};

/// Log-density tabulated on a grid and interpolated linearly in between,
/// together with a bound J on |d/dx log P|.
class TabulatedPrior {
 public:
  /// Validates that every grid cell's slope is within `slope_bound`.
  TabulatedPrior(std::vector<double> grid, std::vector<double> log_density, double slope_bound);

  /// Builds a prior whose J is the largest cell slope, i.e. the exact supremum
  /// of the interpolant's log-slope.
  static TabulatedPrior certified(std::vector<double> grid, std::vector<double> log_density);

  std::span<const double> grid() const noexcept { return grid_; }
  std::span<const double> log_density_values() const noexcept { return log_density_; }
  double slope_bound() const noexcept { return slope_bound_; }
  double lower() const noexcept { return grid_.front(); }
  double upper() const noexcept { return grid_.back(); }
  bool contains(double x) const noexcept { return x >= lower() && x <= upper(); }

  /// Index of the cell [grid[k], grid[k+1]] holding x. Requires contains(x).
  std::size_t cell(double x) const noexcept;

 private:
  std::vector<double> grid_;
  std::vector<double> log_density_;
  double slope_bound_;
};

using Prior = std::variant<GaussianPrior, GaussianMixturePrior, UniformPrior, TabulatedPrior>;

/// Bound J on |d/dx log P|; std::nullopt means the slope is unbounded.
using SlopeBound = std::optional<double>;

double log_density(const GaussianPrior& prior, double x);
double log_density(const GaussianMixturePrior& prior, double x);
double log_density(const UniformPrior& prior, double x);
double log_density(const TabulatedPrior& prior, double x);
double log_density(const Prior& prior, double x);

double log_density_slope(const GaussianPrior& prior, double x);
double log_density_slope(const GaussianMixturePrior& prior, double x);
double log_density_slope(const UniformPrior& prior, double x);
double log_density_slope(const TabulatedPrior& prior, double x);
double log_density_slope(const Prior& prior, double x);

SlopeBound slope_bound(const GaussianPrior& prior);
SlopeBound slope_bound(const GaussianMixturePrior& prior);
SlopeBound slope_bound(const UniformPrior& prior);
SlopeBound slope_bound(const TabulatedPrior& prior);
SlopeBound slope_bound(const Prior& prior);

inline double density(const Prior& prior, double x) { return std::exp(log_density(prior, x)); }

/// Normal-kernel density estimate: one component per sample, weights 1/L.
GaussianMixturePrior kde_from_samples(std::span<const double> samples, double bandwidth);

/// As above with the bandwidth chosen by silverman_bandwidth().
GaussianMixturePrior kde_from_samples(std::span<const double> samples);

/// Normal-reference rule 1.06 * sd * L^(-1/5), sd being the sample
/// standard deviation (n - 1 denominator).
double silverman_bandwidth(std::span<const double> samples);

/// One decimal number per line; blank lines and lines starting with '#'
/// are skipped. Throws std::domain_error on malformed lines.
std::vector<double> read_samples(std::istream& in);
std::vector<double> read_samples(const std::filesystem::path& path);

/// CSV with header `x,log_density`.
TabulatedPrior read_tabulated_prior(const std::filesystem::path& path, std::optional<double> slope_bound);

/// CSV with header `weight,mean,sigma`; every row must carry the same sigma.
GaussianMixturePrior read_mixture(std::istream& in);
GaussianMixturePrior read_mixture(const std::filesystem::path& path);
void write_mixture(std::ostream& out, const GaussianMixturePrior& prior);

}  // namespace pirm
