#include "pirm/tuning.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

#include "pirm/csv.hpp"

namespace pirm {

double recommend_c0(const C0Regression& reg, double d, std::int64_t planned_iterations) {
  if (!(d >= 0.0) || !std::isfinite(d)) throw std::domain_error("recommend_c0: noise sd must be >= 0");
  if (planned_iterations < 1) throw std::domain_error("recommend_c0: planned iterations must be >= 1");
  const double raw = reg.coef_d * d + reg.coef_iter * static_cast<double>(planned_iterations) + reg.intercept;
  return std::max(raw, kMinRecommendedC0);
}

C0Fit fit_c0_regression(std::span<const C0Observation> rows) {
  if (rows.size() < 3) throw std::domain_error("fit_c0_regression: need at least three rows");
  std::set<double> ds;
  std::set<double> its;
  for (const auto& r : rows) {
    if (!std::isfinite(r.d) || !std::isfinite(r.iteration) || !std::isfinite(r.optimal_c0)) {
      throw std::domain_error("fit_c0_regression: rows must be finite");
    }
    ds.insert(r.d);
    its.insert(r.iteration);
  }
  if (ds.size() < 2 || its.size() < 2) {
    throw std::domain_error("fit_c0_regression: need two distinct d and two distinct iteration values");
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd target(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& r = rows[static_cast<std::size_t>(k)];
    design.row(k) << r.d, r.iteration, 1.0;
    target(k) = r.optimal_c0;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) throw std::domain_error("fit_c0_regression: design matrix is rank deficient");
  const Eigen::Vector3d beta = qr.solve(target);

  const Eigen::VectorXd residual = target - design * beta;
  const double sse = residual.squaredNorm();
  const double sst = (target.array() - target.mean()).matrix().squaredNorm();

  C0Fit fit;
  fit.regression = {beta(0), beta(1), beta(2)};
  fit.rmse = std::sqrt(sse / static_cast<double>(n));
  fit.r2 = sst > 0.0 ? 1.0 - sse / sst : 1.0;
  return fit;
}

void write_c0_observations(std::ostream& out, std::span<const C0Observation> rows) {
  out << "d,iteration,optimal_c0\n";
  for (const auto& r : rows) {
    out << csv::format_number(r.d) << ',' << csv::format_number(r.iteration) << ','
        << csv::format_number(r.optimal_c0) << '\n';
  }
}

std::vector<C0Observation> read_c0_observations(std::istream& in) {
  std::vector<C0Observation> rows;
  for (const auto& f : csv::read_table(in, "d,iteration,optimal_c0")) {
    rows.push_back({csv::parse_number(f[0]), csv::parse_number(f[1]), csv::parse_number(f[2])});
  }
  return rows;
}

void write_c0_fit(std::ostream& out, const C0Fit& fit) {
  out << "coef_d,coef_iter,intercept,rmse,r2\n"
      << csv::format_number(fit.regression.coef_d) << ',' << csv::format_number(fit.regression.coef_iter) << ','
      << csv::format_number(fit.regression.intercept) << ',' << csv::format_number(fit.rmse) << ','
      << csv::format_number(fit.r2) << '\n';
}

C0Regression read_c0_regression(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::domain_error("coefficient file is empty");
  const auto h = csv::trim(header);
  const auto columns = csv::split(h);
  if (h != "coef_d,coef_iter,intercept" && h != "coef_d,coef_iter,intercept,rmse,r2") {
    throw std::domain_error("coefficient file must start with 'coef_d,coef_iter,intercept'");
  }
  std::string line;
  while (std::getline(in, line)) {
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != columns.size()) throw std::domain_error("coefficient row has the wrong number of fields");
    C0Regression reg{csv::parse_number(fields[0]), csv::parse_number(fields[1]), csv::parse_number(fields[2])};
    if (!std::isfinite(reg.coef_d) || !std::isfinite(reg.coef_iter) || !std::isfinite(reg.intercept)) {
      throw std::domain_error("coefficients must be finite");
    }
    return reg;
  }
  throw std::domain_error("coefficient file has no data row");
}

}  // namespace pirm
