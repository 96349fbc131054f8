#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pirm {

enum class TieBreak { SmallestX };

struct ArgmaxOptions {
  double abs_tol = 1e-10;
  /// Budget for golden-section evaluations; the initial grid scan is not counted.
  int max_evals = 200;
  TieBreak tie_break = TieBreak::SmallestX;
};

/// Raised when refinement exhausts ArgmaxOptions::max_evals.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_candidate)
      : std::runtime_error(what), best_candidate_(best_candidate) {}

  double best_candidate() const noexcept { return best_candidate_; }

 private:
  double best_candidate_;
};

/// Log-posterior values closer than this are treated as tied.
inline constexpr double kTieTolerance = 1e-12;

/// Global maximizer of `objective` on [lo, hi].
///
/// Scans `grid_points` equally spaced candidates (endpoints included), keeps
/// the discrete local maxima within kTieTolerance of the best value, picks the
/// smallest-x one, and refines it by golden-section search over its two
/// neighbouring cells until the bracket is narrower than abs_tol. A degenerate
/// bracket (lo == hi) returns lo without evaluating anything.
template <typename F>
  requires std::invocable<F&, double>
double maximize_on_bracket(F&& objective, double lo, double hi, std::size_t grid_points,
                           const ArgmaxOptions& opts = {}) {
  if (!(opts.abs_tol > 0.0)) throw std::domain_error("ArgmaxOptions: abs_tol must be positive");
  if (!(lo <= hi)) throw std::domain_error("maximize_on_bracket: empty or non-finite bracket");
  if (lo == hi) return lo;

  const std::size_t n = std::max<std::size_t>(grid_points, 3);
  std::vector<double> xs(n);
  std::vector<double> fs(n);
  const double width = hi - lo;
  for (std::size_t j = 0; j < n; ++j) {
    xs[j] = (j + 1 == n) ? hi : lo + width * static_cast<double>(j) / static_cast<double>(n - 1);
    fs[j] = objective(xs[j]);
  }

  double top = -std::numeric_limits<double>::infinity();
  for (double f : fs) top = std::max(top, f);
  if (!std::isfinite(top)) throw std::domain_error("maximize_on_bracket: objective is not finite on the bracket");

  std::size_t k = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const bool left_ok = j == 0 || fs[j] >= fs[j - 1];
    const bool right_ok = j + 1 == n || fs[j] >= fs[j + 1];
    if (left_ok && right_ok && fs[j] >= top - kTieTolerance) {
      k = j;
      break;
    }
  }

  double a = xs[k == 0 ? 0 : k - 1];
  double b = xs[k + 1 == n ? n - 1 : k + 1];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  int evals = 2;

  const auto converged = [&] {
    const double scale = std::max(std::abs(a), std::abs(b));
    return b - a <= opts.abs_tol || b - a <= 4.0 * std::numeric_limits<double>::epsilon() * scale;
  };
  while (!converged()) {
    if (evals >= opts.max_evals) {
      const double best = fc >= fd ? c : d;
      throw ConvergenceError("maximize_on_bracket: evaluation budget exhausted", best);
    }
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
    ++evals;
  }
  return 0.5 * (a + b);
}

}  // namespace pirm
