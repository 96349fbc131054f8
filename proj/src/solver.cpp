#include "pirm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <variant>

namespace pirm {

namespace {

void require_spread(double c) {
  if (!(c > 0.0)) throw std::domain_error("RM distribution spread must be positive");
}

// Weight of the prior mean in the product of N(mu, sigma^2) and N(m, c^2):
// c^2 / (c^2 + sigma^2), written to stay finite when sigma/c is huge or tiny.
double prior_pull(double sigma, double c) {
  const double ratio = sigma / c;
  return 1.0 / (1.0 + ratio * ratio);
}

double log_rm_density(double x, double m, double c) {
  const double z = (x - m) / c;
  return -0.5 * z * z;
}

}  // namespace

double rm_proposal(const RmState& state, const Observation& obs, const StepSchedule& sched) {
  return state.x - step_size(sched, state.i) * (obs.y - obs.y_target);
}

RmState standard_rm_step(const RmState& state, const Observation& obs, const StepSchedule& sched) {
  return {state.i + 1, rm_proposal(state, obs, sched)};
}

double gaussian_posterior_argmax(const GaussianPrior& prior, double m, double c) {
  require_spread(c);
  return m + (prior.mean() - m) * prior_pull(prior.sd(), c);
}

std::vector<double> component_maximizers(const GaussianMixturePrior& prior, double m, double c) {
  require_spread(c);
  const double pull = prior_pull(prior.sigma(), c);
  std::vector<double> z;
  z.reserve(prior.size());
  for (const auto& comp : prior.components()) z.push_back(m + (comp.mean - m) * pull);
  return z;
}

double mixture_posterior_argmax(const GaussianMixturePrior& prior, double m, double c, const ArgmaxOptions& opts) {
  const auto z = component_maximizers(prior, m, c);
  const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
  const auto objective = [&](double x) { return log_density(prior, x) + log_rm_density(x, m, c); };
  return maximize_on_bracket(objective, *lo, *hi, std::max<std::size_t>(64, 8 * prior.size()), opts);
}

double general_posterior_argmax(const Prior& prior, double m, double c, const ArgmaxOptions& opts,
                                SlopeBound declared_bound) {
  require_spread(c);
  const SlopeBound bound = declared_bound ? declared_bound : slope_bound(prior);
  if (!bound) {
    throw std::invalid_argument(
        "general_posterior_argmax: prior log-slope is unbounded; use the Gaussian or mixture path or declare J");
  }
  if (!(*bound >= 0.0)) throw std::domain_error("general_posterior_argmax: J must be non-negative");
  if (!std::isfinite(m)) throw std::domain_error("general_posterior_argmax: RM proposal is not finite");

  const double reach = *bound * c * c;
  double lo = m - reach;
  double hi = m + reach;
  std::size_t grid_points = 64;
  if (const auto* tab = std::get_if<TabulatedPrior>(&prior)) {
    if (!tab->contains(m)) {
      throw std::domain_error("general_posterior_argmax: RM proposal lies outside the tabulated prior's grid");
    }
    lo = std::max(lo, tab->lower());
    hi = std::min(hi, tab->upper());
    const auto grid = tab->grid();
    const auto inside = std::count_if(grid.begin(), grid.end(), [&](double g) { return g >= lo && g <= hi; });
    grid_points = std::max<std::size_t>(64, 8 * (static_cast<std::size_t>(inside) + 1));
  }
  if (lo == hi) return m;
  const auto objective = [&](double x) { return log_density(prior, x) + log_rm_density(x, m, c); };
  return maximize_on_bracket(objective, lo, hi, grid_points, opts);
}

double posterior_argmax(const Prior& prior, double m, double c, const ArgmaxOptions& opts) {
  require_spread(c);
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianPrior>) {
          return gaussian_posterior_argmax(p, m, c);
        } else if constexpr (std::is_same_v<T, GaussianMixturePrior>) {
          return mixture_posterior_argmax(p, m, c, opts);
        } else if constexpr (std::is_same_v<T, UniformPrior>) {
          return m;
        } else {
          return general_posterior_argmax(prior, m, c, opts);
        }
      },
      prior);
}

RmState prior_rm_step(const RmState& state, const Observation& obs, const StepSchedule& step_sched,
                      const SpreadSchedule& spread_sched, const Prior& prior, const ArgmaxOptions& opts) {
  const double m = rm_proposal(state, obs, step_sched);
  const double c = spread(spread_sched, state.i);
  return {state.i + 1, posterior_argmax(prior, m, c, opts)};
}

double equivalent_component_mean(double next_x, double m, double c, double sigma) {
  require_spread(c);
  const double ratio = (sigma * sigma) / (c * c);
  return (1.0 + ratio) * next_x - ratio * m;
}

}  // namespace pirm
