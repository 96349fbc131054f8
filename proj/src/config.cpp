#include "pirm/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>

#include "pirm/csv.hpp"

namespace pirm {

namespace {

const std::set<std::string>& scenario_keys() {
  static const std::set<std::string> keys{
      "prior_mean", "prior_sd", "slope_log_mean", "slope_log_sd", "s1_log10_low", "s1_log10_high", "noise_sd",
      "c0",         "iterations", "runs",         "batches",      "start_mode",   "algorithm",     "seed",
      "prior.kind", "prior.mu",   "prior.sigma",  "prior.samples_path", "prior.bandwidth", "prior.grid_path",
      "prior.J",    "prior.mixture_path"};
  return keys;
}

const std::map<std::string, std::set<std::string>>& prior_kind_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"gaussian", {"prior.mu", "prior.sigma"}},
      {"mixture", {"prior.mixture_path"}},
      {"kde", {"prior.samples_path", "prior.bandwidth"}},
      {"uniform", {}},
      {"tabulated", {"prior.grid_path", "prior.J"}},
  };
  return keys;
}

class Entries {
 public:
  explicit Entries(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  std::optional<std::string> text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  void real(const std::string& key, double& out) const {
    if (auto v = text(key)) {
      try {
        out = csv::parse_number(*v);
      } catch (const std::domain_error&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + *v + "'");
      }
    }
  }

  void count(const std::string& key, std::uint64_t& out) const {
    if (auto v = text(key)) {
      const auto* first = v->data();
      const auto* last = v->data() + v->size();
      auto [ptr, ec] = std::from_chars(first, last, out);
      if (v->empty() || ec != std::errc{} || ptr != last) {
        throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + *v + "'");
      }
    }
  }

 private:
  std::map<std::string, std::string> values_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() ? base / path : path;
}

Prior build_prior(const Entries& e, const Scenario& sc, const std::string& kind,
                  const std::filesystem::path& base_dir) {
  const auto need = [&](const std::string& key) {
    auto v = e.text(key);
    if (!v) throw ConfigError("prior.kind=" + kind + " requires '" + key + "'");
    return *v;
  };
  if (kind == "gaussian") {
    double mu = sc.prior_mean;
    double sigma = sc.prior_sd;
    e.real("prior.mu", mu);
    e.real("prior.sigma", sigma);
    return GaussianPrior(mu, sigma);
  }
  if (kind == "uniform") return UniformPrior{};
  if (kind == "mixture") return read_mixture(resolve(base_dir, need("prior.mixture_path")));
  if (kind == "kde") {
    const auto samples = read_samples(resolve(base_dir, need("prior.samples_path")));
    if (e.text("prior.bandwidth")) {
      double h = 0.0;
      e.real("prior.bandwidth", h);
      return kde_from_samples(samples, h);
    }
    return kde_from_samples(samples);
  }
  std::optional<double> j;
  if (e.text("prior.J")) {
    double v = 0.0;
    e.real("prior.J", v);
    j = v;
  }
  return read_tabulated_prior(resolve(base_dir, need("prior.grid_path")), j);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = csv::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key(csv::trim(text.substr(0, eq)));
    std::string value(csv::trim(text.substr(eq + 1)));
    if (!scenario_keys().contains(key)) {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (!values.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }

  const Entries e(values);
  ExperimentConfig cfg;
  cfg.all_variants = true;
  Scenario& sc = cfg.scenario;
  e.real("prior_mean", sc.prior_mean);
  e.real("prior_sd", sc.prior_sd);
  e.real("slope_log_mean", sc.slope_log_mean);
  e.real("slope_log_sd", sc.slope_log_sd);
  e.real("s1_log10_low", sc.s1_log10_low);
  e.real("s1_log10_high", sc.s1_log10_high);
  e.real("noise_sd", sc.noise_sd);
  e.real("c0", sc.c0);
  e.count("iterations", sc.iterations);
  e.count("runs", sc.runs);
  e.count("batches", sc.batches);
  e.count("seed", sc.seed);

  if (auto v = e.text("start_mode")) {
    if (*v == "prior") {
      sc.start_mode = StartMode::Prior;
    } else if (*v == "uniform") {
      sc.start_mode = StartMode::Uniform;
    } else {
      throw ConfigError("start_mode must be 'prior' or 'uniform'");
    }
  }
  if (auto v = e.text("algorithm")) {
    if (*v == "standard") {
      sc.algorithm = Algorithm::Standard;
      cfg.all_variants = false;
    } else if (*v == "prior") {
      sc.algorithm = Algorithm::Prior;
      cfg.all_variants = false;
    } else if (*v != "all") {
      throw ConfigError("algorithm must be 'standard', 'prior' or 'all'");
    }
  }

  const std::string kind = e.text("prior.kind").value_or("gaussian");
  const auto allowed = prior_kind_keys().find(kind);
  if (allowed == prior_kind_keys().end()) {
    throw ConfigError("prior.kind must be one of gaussian, mixture, kde, uniform, tabulated");
  }
  for (const auto& [key, _] : values) {
    if (key.starts_with("prior.") && key != "prior.kind" && !allowed->second.contains(key)) {
      throw ConfigError("key '" + key + "' does not apply to prior.kind=" + kind);
    }
  }

  try {
    sc.validate();
    if (e.text("prior.kind")) sc.prior = build_prior(e, sc, kind, base_dir);
  } catch (const std::domain_error& err) {
    throw ConfigError(err.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.parent_path());
}

}  // namespace pirm
