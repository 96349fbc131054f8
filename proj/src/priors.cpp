#include "pirm/priors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "pirm/csv.hpp"

namespace pirm {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2*pi)

}  // namespace

GaussianPrior::GaussianPrior(double mean, double sd) : mean_(mean), sd_(sd) {
  if (!std::isfinite(mean)) throw std::domain_error("GaussianPrior: mean must be finite");
  if (!(sd > 0.0) || !std::isfinite(sd)) throw std::domain_error("GaussianPrior: sd must be positive");
}

GaussianMixturePrior::GaussianMixturePrior(std::vector<MixtureComponent> components, double sigma)
    : components_(std::move(components)), sigma_(sigma) {
  if (components_.empty()) throw std::domain_error("GaussianMixturePrior: needs at least one component");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::domain_error("GaussianMixturePrior: sigma must be positive");
  }
  // Kahan summation: L copies of 1/L must sum to 1 within 1e-12 for large L.
  double sum = 0.0;
  double carry = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0) || c.weight > 1.0) {
      throw std::domain_error("GaussianMixturePrior: weights must lie in (0, 1]");
    }
    if (!std::isfinite(c.mean)) throw std::domain_error("GaussianMixturePrior: means must be finite");
    const double y = c.weight - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::domain_error("GaussianMixturePrior: weights must sum to 1");
  }
  const auto [lo, hi] = std::minmax_element(components_.begin(), components_.end(),
                                            [](const auto& a, const auto& b) { return a.mean < b.mean; });
  min_mean_ = lo->mean;
  max_mean_ = hi->mean;
}

TabulatedPrior::TabulatedPrior(std::vector<double> grid, std::vector<double> log_density, double slope_bound)
    : grid_(std::move(grid)), log_density_(std::move(log_density)), slope_bound_(slope_bound) {
  if (grid_.size() < 2) throw std::domain_error("TabulatedPrior: need at least two grid points");
  if (grid_.size() != log_density_.size()) {
    throw std::domain_error("TabulatedPrior: grid and log-density sizes differ");
  }
  if (!(slope_bound >= 0.0) || !std::isfinite(slope_bound)) {
    throw std::domain_error("TabulatedPrior: slope bound must be finite and non-negative");
  }
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    if (!std::isfinite(grid_[k]) || !std::isfinite(log_density_[k])) {
      throw std::domain_error("TabulatedPrior: grid and log-density values must be finite");
    }
    if (k > 0) {
      if (!(grid_[k] > grid_[k - 1])) throw std::domain_error("TabulatedPrior: grid must be strictly increasing");
      const double slope = (log_density_[k] - log_density_[k - 1]) / (grid_[k] - grid_[k - 1]);
      if (std::abs(slope) > slope_bound * (1.0 + 1e-12)) {
        throw std::domain_error("TabulatedPrior: cell slope " + std::to_string(slope) + " exceeds J");
      }
    }
  }
}

TabulatedPrior TabulatedPrior::certified(std::vector<double> grid, std::vector<double> log_density) {
  double bound = 0.0;
  for (std::size_t k = 1; k < std::min(grid.size(), log_density.size()); ++k) {
    bound = std::max(bound, std::abs((log_density[k] - log_density[k - 1]) / (grid[k] - grid[k - 1])));
  }
  return TabulatedPrior(std::move(grid), std::move(log_density), bound);
}

std::size_t TabulatedPrior::cell(double x) const noexcept {
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const auto k = static_cast<std::size_t>(std::distance(grid_.begin(), it));
  return std::clamp<std::size_t>(k, 1, grid_.size() - 1) - 1;
}

// log_density

double log_density(const GaussianPrior& prior, double x) {
  const double z = (x - prior.mean()) / prior.sd();
  return -0.5 * z * z - std::log(prior.sd()) - kHalfLog2Pi;
}

double log_density(const GaussianMixturePrior& prior, double x) {
  const double inv_var = 1.0 / (prior.sigma() * prior.sigma());
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& c : prior.components()) {
    peak = std::max(peak, std::log(c.weight) - 0.5 * (x - c.mean) * (x - c.mean) * inv_var);
  }
  double acc = 0.0;
  for (const auto& c : prior.components()) {
    acc += std::exp(std::log(c.weight) - 0.5 * (x - c.mean) * (x - c.mean) * inv_var - peak);
  }
  return peak + std::log(acc) - std::log(prior.sigma()) - kHalfLog2Pi;
}

double log_density(const UniformPrior&, double) { return 0.0; }

double log_density(const TabulatedPrior& prior, double x) {
  if (!prior.contains(x)) throw std::domain_error("TabulatedPrior evaluated outside its grid");
  const auto grid = prior.grid();
  const auto values = prior.log_density_values();
  const std::size_t k = prior.cell(x);
  const double t = (x - grid[k]) / (grid[k + 1] - grid[k]);
  return values[k] + t * (values[k + 1] - values[k]);
}

double log_density(const Prior& prior, double x) {
  return std::visit([x](const auto& p) { return log_density(p, x); }, prior);
}

// log_density_slope

double log_density_slope(const GaussianPrior& prior, double x) {
  return -(x - prior.mean()) / (prior.sd() * prior.sd());
}

double log_density_slope(const GaussianMixturePrior& prior, double x) {
  // Responsibility-weighted average of the component slopes.
  const double inv_var = 1.0 / (prior.sigma() * prior.sigma());
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& c : prior.components()) {
    peak = std::max(peak, std::log(c.weight) - 0.5 * (x - c.mean) * (x - c.mean) * inv_var);
  }
  double norm = 0.0;
  double slope = 0.0;
  for (const auto& c : prior.components()) {
    const double r = std::exp(std::log(c.weight) - 0.5 * (x - c.mean) * (x - c.mean) * inv_var - peak);
    norm += r;
    slope += r * (c.mean - x) * inv_var;
  }
  return slope / norm;
}

double log_density_slope(const UniformPrior&, double) { return 0.0; }

double log_density_slope(const TabulatedPrior& prior, double x) {
  if (!prior.contains(x)) throw std::domain_error("TabulatedPrior evaluated outside its grid");
  const auto grid = prior.grid();
  const auto values = prior.log_density_values();
  const std::size_t k = prior.cell(x);
  return (values[k + 1] - values[k]) / (grid[k + 1] - grid[k]);
}

double log_density_slope(const Prior& prior, double x) {
  return std::visit([x](const auto& p) { return log_density_slope(p, x); }, prior);
}

// slope_bound

SlopeBound slope_bound(const GaussianPrior&) { return std::nullopt; }
SlopeBound slope_bound(const GaussianMixturePrior&) { return std::nullopt; }
SlopeBound slope_bound(const UniformPrior&) { return 0.0; }
SlopeBound slope_bound(const TabulatedPrior& prior) { return prior.slope_bound(); }

SlopeBound slope_bound(const Prior& prior) {
  return std::visit([](const auto& p) { return slope_bound(p); }, prior);
}

// KDE

GaussianMixturePrior kde_from_samples(std::span<const double> samples, double bandwidth) {
  if (samples.empty()) throw std::domain_error("kde_from_samples: empty sample list");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::domain_error("kde_from_samples: bandwidth must be positive");
  }
  const double w = 1.0 / static_cast<double>(samples.size());
  std::vector<MixtureComponent> components;
  components.reserve(samples.size());
  for (double s : samples) {
    if (!std::isfinite(s)) throw std::domain_error("kde_from_samples: samples must be finite");
    components.push_back({w, s});
  }
  return GaussianMixturePrior(std::move(components), bandwidth);
}

GaussianMixturePrior kde_from_samples(std::span<const double> samples) {
  if (samples.empty()) throw std::domain_error("kde_from_samples: empty sample list");
  return kde_from_samples(samples, silverman_bandwidth(samples));
}

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.size() < 2) throw std::domain_error("silverman_bandwidth: need at least two samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) throw std::domain_error("silverman_bandwidth: samples have zero spread");
  return 1.06 * sd * std::pow(n, -0.2);
}

// File formats

std::vector<double> read_samples(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = csv::trim(line);
    if (text.empty() || text.front() == '#') continue;
    try {
      out.push_back(csv::parse_number(text));
    } catch (const std::domain_error& e) {
      throw std::domain_error("sample line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<double> read_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open sample file " + path.string());
  return read_samples(in);
}

TabulatedPrior read_tabulated_prior(const std::filesystem::path& path, std::optional<double> bound) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open grid file " + path.string());
  std::vector<double> grid;
  std::vector<double> values;
  for (const auto& row : csv::read_table(in, "x,log_density")) {
    grid.push_back(csv::parse_number(row[0]));
    values.push_back(csv::parse_number(row[1]));
  }
  if (bound) return TabulatedPrior(std::move(grid), std::move(values), *bound);
  return TabulatedPrior::certified(std::move(grid), std::move(values));
}

GaussianMixturePrior read_mixture(std::istream& in) {
  std::vector<MixtureComponent> components;
  std::optional<double> sigma;
  for (const auto& row : csv::read_table(in, "weight,mean,sigma")) {
    const double s = csv::parse_number(row[2]);
    if (sigma && s != *sigma) throw std::domain_error("mixture components must share one sigma");
    sigma = s;
    components.push_back({csv::parse_number(row[0]), csv::parse_number(row[1])});
  }
  if (!sigma) throw std::domain_error("mixture file has no components");
  return GaussianMixturePrior(std::move(components), *sigma);
}

GaussianMixturePrior read_mixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open mixture file " + path.string());
  return read_mixture(in);
}

void write_mixture(std::ostream& out, const GaussianMixturePrior& prior) {
  out << "weight,mean,sigma\n";
  const std::string sigma = csv::format_number(prior.sigma());
  for (const auto& c : prior.components()) {
    out << csv::format_number(c.weight) << ',' << csv::format_number(c.mean) << ',' << sigma << '\n';
  }
}

}  // namespace pirm
