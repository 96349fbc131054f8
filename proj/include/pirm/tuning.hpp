#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace pirm {

/// Linear model c0 = coef_d * d + coef_iter * iterations + intercept.
struct C0Regression {
  double coef_d = 0.0;
  double coef_iter = 0.0;
  double intercept = 0.0;
};

/// Published fit over d in [0, 2], 6-100 iterations, prior N(0.5, 0.25^2).
inline constexpr C0Regression kDefaultC0Regression{1.32, -0.0089, 0.13};

/// Smallest c0 recommend_c0 will return.
inline constexpr double kMinRecommendedC0 = 0.01;

/// Evaluates the linear rule, clamped below at kMinRecommendedC0.
/// Throws std::domain_error for d < 0 or planned_iterations < 1.
double recommend_c0(const C0Regression& reg, double d, std::int64_t planned_iterations);

/// One cell of an optimal-c0 surface.
struct C0Observation {
  double d = 0.0;
  double iteration = 0.0;
  double optimal_c0 = 0.0;
};

struct C0Fit {
  C0Regression regression;
  double rmse = 0.0;  ///< sqrt(SSE / n)
  double r2 = 0.0;
};

/// Ordinary least squares on [d, iteration, 1]. Needs at least three rows,
/// two distinct d values and two distinct iteration values; a rank-deficient
/// design throws std::domain_error.
C0Fit fit_c0_regression(std::span<const C0Observation> rows);

/// `d,iteration,optimal_c0`
void write_c0_observations(std::ostream& out, std::span<const C0Observation> rows);
std::vector<C0Observation> read_c0_observations(std::istream& in);

/// `coef_d,coef_iter,intercept,rmse,r2`
void write_c0_fit(std::ostream& out, const C0Fit& fit);

/// Accepts either `coef_d,coef_iter,intercept` or the five-column fit file.
C0Regression read_c0_regression(std::istream& in);

}  // namespace pirm
