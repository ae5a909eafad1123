#include "drpo/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "drpo/log.hpp"

namespace drpo {

namespace {

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(strip(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool all_digits(const std::string& s, size_t b, size_t e) {
  for (size_t i = b; i < e; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

// Strict YYYY-MM-DD with a loose day-of-month range check.
void check_iso_date(const std::string& d, int row) {
  bool ok = d.size() == 10 && d[4] == '-' && d[7] == '-' &&
            all_digits(d, 0, 4) && all_digits(d, 5, 7) && all_digits(d, 8, 10);
  if (ok) {
    int month = (d[5] - '0') * 10 + (d[6] - '0');
    int day = (d[8] - '0') * 10 + (d[9] - '0');
    ok = month >= 1 && month <= 12 && day >= 1 && day <= 31;
  }
  if (!ok) {
    throw ParseError("row " + std::to_string(row) + ": '" + d +
                     "' is not an ISO-8601 date");
  }
}

double parse_price(const std::string& cell, int row, int col) {
  const std::string loc = "row " + std::to_string(row) + ", column " +
                          std::to_string(col);
  if (cell.empty()) throw ParseError(loc + ": empty price cell");
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError(loc + ": '" + cell + "' is not a decimal price");
  }
  if (!std::isfinite(value)) throw ParseError(loc + ": non-finite price");
  return value;
}

}  // namespace

void PriceSeries::validate() const {
  const int T = n_obs();
  const int n = n_assets();
  if (n < 1) throw DataError("price series needs at least one asset");
  if (T < 2) throw DataError("price series needs at least two observations");
  if (static_cast<int>(tickers.size()) != n) {
    throw DataError("ticker count does not match price columns");
  }
  if (static_cast<int>(dates.size()) != T) {
    throw DataError("date count does not match price rows");
  }
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < n; ++j) {
      if (!(prices(t, j) > 0.0) || !std::isfinite(prices(t, j))) {
        throw DataError("non-positive price for " + tickers[j] + " on " +
                        dates[t]);
      }
    }
    // ISO dates compare chronologically as strings.
    if (t > 0 && !(dates[t - 1] < dates[t])) {
      throw DataError("dates not strictly increasing at " + dates[t]);
    }
  }
}

PriceSeries load_prices(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw ParseError("'" + path + "' is empty");
  auto header = split_csv_line(line);
  if (header.size() < 2) throw ParseError("header needs date plus one ticker");
  std::string first = header[0];
  std::transform(first.begin(), first.end(), first.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (first != "date") throw ParseError("first header column must be 'date'");

  PriceSeries ps;
  ps.tickers.assign(header.begin() + 1, header.end());
  const int n = static_cast<int>(ps.tickers.size());

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != n + 1) {
      throw ParseError("row " + std::to_string(lineno) + ": expected " +
                       std::to_string(n + 1) + " cells, got " +
                       std::to_string(cells.size()));
    }
    check_iso_date(cells[0], lineno);
    ps.dates.push_back(cells[0]);
    std::vector<double> row(n);
    for (int j = 0; j < n; ++j) row[j] = parse_price(cells[j + 1], lineno, j + 1);
    rows.push_back(std::move(row));
  }

  const int T = static_cast<int>(rows.size());
  ps.prices.resize(T, n);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < n; ++j) ps.prices(t, j) = rows[t][j];
  }
  ps.validate();
  log::info("loaded %d x %d price series from %s", T, n, path.c_str());
  return ps;
}

void ScenarioSet::validate() const {
  if (N() < 2) throw DataError("scenario set needs N >= 2");
  if (n() < 1) throw DataError("scenario set needs n >= 1");
  if (s0.size() != n()) throw DataError("s0 length does not match scenarios");
  if (!s0.allFinite() || !scenarios.allFinite()) {
    throw DataError("scenario set contains non-finite values");
  }
}

ScenarioSet build_scenario_set(const PriceSeries& ps, ScenarioMode mode) {
  ps.validate();
  const int T = ps.n_obs();
  const int n = ps.n_assets();

  ScenarioSet sc;
  sc.s0 = ps.prices.row(T - 1).transpose();
  switch (mode) {
    case ScenarioMode::levels:
      sc.scenarios = ps.prices;
      break;
    case ScenarioMode::one_period_ahead: {
      if (T < 3) {
        throw DataError("one-period-ahead mode needs at least 3 observations");
      }
      sc.scenarios.resize(T - 1, n);
      for (int t = 0; t + 1 < T; ++t) {
        sc.scenarios.row(t) =
            sc.s0.transpose().array() *
            (ps.prices.row(t + 1).array() / ps.prices.row(t).array());
      }
      break;
    }
  }
  sc.validate();
  return sc;
}

namespace detail {

Moments raw_moments(const ScenarioSet& sc) {
  sc.validate();
  const int N = sc.N();
  Moments m;
  m.mean = sc.scenarios.colwise().mean().transpose();
  Eigen::MatrixXd centered = sc.scenarios.rowwise() - m.mean.transpose();
  m.cov = (centered.transpose() * centered) / static_cast<double>(N);
  m.cov = ((m.cov + m.cov.transpose()) / 2.0).eval();  // exact symmetry
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.cov);
  m.min_eig = eig.eigenvalues().minCoeff();
  return m;
}

}  // namespace detail

Moments empirical_moments(const ScenarioSet& sc, double eig_tol_factor,
                          double ridge) {
  Moments m = detail::raw_moments(sc);
  const int n = sc.n();
  if (ridge > 0.0) {
    log::info("adding ridge %.3e * I to covariance", ridge);
    m.cov.diagonal().array() += ridge;
    m.min_eig += ridge;
  }
  const double tol = eig_tol_factor * m.cov.trace() / static_cast<double>(n);
  if (m.min_eig <= tol) {
    throw SingularCovariance("covariance not positive definite (min eig " +
                             std::to_string(m.min_eig) + ", tol " +
                             std::to_string(tol) + ")");
  }
  return m;
}

}  // namespace drpo
