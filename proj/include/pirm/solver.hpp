#pragma once

#include <vector>

#include "pirm/argmax.hpp"
#include "pirm/priors.hpp"
#include "pirm/schedules.hpp"

namespace pirm {

/// Position of one trajectory: iterate x_i at 1-based index i.
struct RmState {
  Iteration i = 1;
  double x = 0.0;
};

/// Noisy measurement y_i = f(x_i) + e_i and the target level y_t.
struct Observation {
  double y = 0.0;
  double y_target = 0.0;
};

/// x_i - s_i (y_i - y_t): the standard RM update and the mean of the RM distribution.
double rm_proposal(const RmState& state, const Observation& obs, const StepSchedule& sched);

RmState standard_rm_step(const RmState& state, const Observation& obs, const StepSchedule& sched);

/// argmax of N(x | mu_n, sd_n^2) * N(x | m, c^2), the precision-weighted mean.
double gaussian_posterior_argmax(const GaussianPrior& prior, double m, double c);

/// Per-component maximizers z_r of N(x | mu_r, sigma^2) * N(x | m, c^2), in component order.
std::vector<double> component_maximizers(const GaussianMixturePrior& prior, double m, double c);

/// Global argmax of mixture * N(x | m, c^2). The maximizer always lies in
/// [min z_r, max z_r], so only that bracket is scanned (max(64, 8 L) grid points).
double mixture_posterior_argmax(const GaussianMixturePrior& prior, double m, double c,
                                const ArgmaxOptions& opts = {});

/// argmax of prior * N(x | m, c^2) over [m - J c^2, m + J c^2].
///
/// A prior whose log-slope is bounded by J cannot move the maximizer further
/// than J c^2 from m, so that interval is a guaranteed bracket. J comes from
/// `declared_bound` when given, otherwise from slope_bound(prior); an unbounded
/// prior without a declaration throws std::invalid_argument. For a
/// TabulatedPrior the bracket is intersected with the grid, and m outside the
/// grid throws std::domain_error.
double general_posterior_argmax(const Prior& prior, double m, double c, const ArgmaxOptions& opts = {},
                                SlopeBound declared_bound = std::nullopt);

/// Dispatches on the prior: Gaussian uses the closed form, mixtures the
/// component bracket, uniform returns m, tabulated the slope-bound bracket.
double posterior_argmax(const Prior& prior, double m, double c, const ArgmaxOptions& opts = {});

/// One prior-information step: x_{i+1} = argmax prior(x) N(x | rm_proposal, c_i^2).
RmState prior_rm_step(const RmState& state, const Observation& obs, const StepSchedule& step_sched,
                      const SpreadSchedule& spread_sched, const Prior& prior, const ArgmaxOptions& opts = {});

/// Mean mu^A of the single same-variance normal whose product with
/// N(x | m, c^2) peaks at `next_x`: (1 + sigma^2/c^2) next_x - (sigma^2/c^2) m.
double equivalent_component_mean(double next_x, double m, double c, double sigma);

}  // namespace pirm
