#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace pirm {

/// 1-based iteration counter.
using Iteration = std::uint64_t;

/// Harmonic gain sequence s_i = s1 / i.
///
/// The harmonic family satisfies sum(s_i) = inf and sum(s_i^2) < inf for any
/// s1 > 0, so the usual stochastic-approximation conditions hold by construction.
class StepSchedule {
 public:
  explicit StepSchedule(double s1) : s1_(s1) {
    if (!(s1 > 0.0) || !std::isfinite(s1)) {
      throw std::domain_error("StepSchedule: s1 must be positive and finite");
    }
  }

  double s1() const noexcept { return s1_; }

 private:
  double s1_;
};

/// Spread of the RM distribution, c_i = c0 / i.
class SpreadSchedule {
 public:
  explicit SpreadSchedule(double c0) : c0_(c0) {
    if (!(c0 > 0.0) || !std::isfinite(c0)) {
      throw std::domain_error("SpreadSchedule: c0 must be positive and finite");
    }
  }

  double c0() const noexcept { return c0_; }

 private:
  double c0_;
};

inline double step_size(const StepSchedule& sched, Iteration i) {
  if (i == 0) throw std::domain_error("step_size: iteration index is 1-based");
  return sched.s1() / static_cast<double>(i);
}

inline double spread(const SpreadSchedule& sched, Iteration i) {
  if (i == 0) throw std::domain_error("spread: iteration index is 1-based");
  return sched.c0() / static_cast<double>(i);
}

}  // namespace pirm
