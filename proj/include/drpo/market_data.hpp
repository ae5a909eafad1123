#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "drpo/errors.hpp"

namespace drpo {

// Historical closing prices: one row per observation date, one column per
// ticker. All prices strictly positive, dates strictly increasing.
struct PriceSeries {
  std::vector<std::string> tickers;
  std::vector<std::string> dates;  // ISO-8601 (YYYY-MM-DD)
  Eigen::MatrixXd prices;          // T x n

  int n_assets() const { return static_cast<int>(prices.cols()); }
  int n_obs() const { return static_cast<int>(prices.rows()); }

  // Throws DataError on any invariant violation (positivity, date order,
  // shape consistency, T >= 2, n >= 1).
  void validate() const;
};

enum class ScenarioMode {
  levels,            // all T price rows are scenarios, s0 = last row
  one_period_ahead,  // s0 scaled by consecutive gross returns (sensitivity mode)
};

// Discrete scenario set: s0 holds current prices, each row of `scenarios`
// is one equally weighted realization of the time-1 price vector.
struct ScenarioSet {
  Eigen::VectorXd s0;
  Eigen::MatrixXd scenarios;  // N x n

  int n() const { return static_cast<int>(scenarios.cols()); }
  int N() const { return static_cast<int>(scenarios.rows()); }

  void validate() const;  // throws DataError
};

// First two moments of the scenario set under the empirical measure
// (population 1/N normalization).
struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double min_eig = 0.0;
};

// Reads the CSV contract: header `date,<ticker>...`, ISO dates in the first
// column, decimal prices elsewhere. Throws ParseError for malformed input
// and DataError for contract violations (non-positive price, date order).
PriceSeries load_prices(const std::string& path);

ScenarioSet build_scenario_set(const PriceSeries& ps,
                               ScenarioMode mode = ScenarioMode::levels);

// Computes mean and population covariance and verifies strict positive
// definiteness. Throws SingularCovariance when the smallest eigenvalue is
// at or below eig_tol_factor * trace / n. A positive `ridge` adds
// ridge * I to the covariance before the check; the addition is logged,
// never implicit.
Moments empirical_moments(const ScenarioSet& sc,
                          double eig_tol_factor = 1e-10,
                          double ridge = 0.0);

namespace detail {
// Moment computation without the definiteness gate (degenerate inputs pass
// through so callers can inspect them).
Moments raw_moments(const ScenarioSet& sc);
}  // namespace detail

}  // namespace drpo
