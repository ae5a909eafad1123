#pragma once

#include <string>
#include <vector>

#include "drpo/critical_search.hpp"

namespace drpo {

// Plot-ready trajectory row. theta_star serializes as a number, the token
// INF (arbitrage) or UNDEF (0/0); JSON uses null plus the arbitrage flag.
struct TrajectoryRow {
  double delta = 0.0;
  double value = 0.0;
  double alpha_star = 0.0;
  ThetaStar theta;
  bool arbitrage = false;
  SolveStatus status = SolveStatus::max_iter;
  int restarts_used = 0;

  friend bool operator==(const TrajectoryRow& x, const TrajectoryRow& y) {
    return x.delta == y.delta && x.value == y.value &&
           x.alpha_star == y.alpha_star && x.theta == y.theta &&
           x.arbitrage == y.arbitrage && x.status == y.status &&
           x.restarts_used == y.restarts_used;
  }
};

std::vector<TrajectoryRow> rows_from_results(
    const std::vector<RobustnessResult>& results);

// Doubles are printed with 17 significant digits so that parsing an output
// file reproduces the in-memory table exactly.
std::string trajectory_to_csv(const std::vector<TrajectoryRow>& rows);
std::string trajectory_to_json(const std::vector<TrajectoryRow>& rows);
std::vector<TrajectoryRow> trajectory_from_csv(const std::string& text);
std::vector<TrajectoryRow> trajectory_from_json(const std::string& text);

std::string critical_to_csv(const CriticalRadius& cr);
std::string critical_to_json(const CriticalRadius& cr);

std::string format_double(double v);  // shortest exact representation

}  // namespace drpo
