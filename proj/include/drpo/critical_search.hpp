#pragma once

#include <functional>
#include <vector>

#include "drpo/outer_solver.hpp"

namespace drpo {

// Robustness degree with an explicit tag: infinity flags classical
// arbitrage (zero robust variance, positive mean return); 0/0 is undefined.
struct ThetaStar {
  enum class Kind { finite, infinite, undefined };
  Kind kind = Kind::undefined;
  double value = 0.0;  // meaningful only when finite

  static ThetaStar finite(double v) { return {Kind::finite, v}; }
  static ThetaStar infinite() { return {Kind::infinite, 0.0}; }
  static ThetaStar undefined() { return {Kind::undefined, 0.0}; }

  bool is_finite() const { return kind == Kind::finite; }
  bool is_infinite() const { return kind == Kind::infinite; }
  bool is_undefined() const { return kind == Kind::undefined; }

  friend bool operator==(const ThetaStar& x, const ThetaStar& y) {
    return x.kind == y.kind && (x.kind != Kind::finite || x.value == y.value);
  }
};

// g_alpha(theta) = alpha^2 / theta^2. Throws DomainError when theta <= 0.
double g_alpha(double alpha, double theta);

// alpha / sqrt(value), with the zero-variance cases flagged.
ThetaStar theta_star(double alpha_star, double value);

struct RobustnessResult {
  AmbiguityRadius delta;
  double value = 0.0;
  double alpha_star = 0.0;
  ThetaStar theta;
  bool arbitrage = false;
  Portfolio w_star;
  SolveStatus status = SolveStatus::max_iter;
  int restarts_used = 0;
};

struct CriticalRadius {
  double theta_target = 0.0;
  double delta_critical = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
};

using ValueFn = std::function<double(double)>;

struct BisectOptions {
  double tol = 1e-6;
  double hi0 = 1.0;      // initial doubling probe
  double hi_cap = 1e18;  // BracketFailure beyond this
};

// Smallest delta with v(delta) >= g for a non-decreasing value function.
CriticalRadius critical_radius_wc(const ValueFn& v, double g,
                                  double theta_target,
                                  const BisectOptions& opts = {});

// Smallest delta with v(delta) <= g for a non-increasing value function;
// flat zero plateaus resolve to their left edge (the infimum).
CriticalRadius critical_radius_bc(const ValueFn& v, double g,
                                  double theta_target,
                                  const BisectOptions& opts = {});

// Problem-level wrappers. alpha* is evaluated once, from the delta = 0
// solve, and fixes the target level g = alpha*^2 / theta^2; the value
// function is the corresponding outer solve, warm-started along the search.
CriticalRadius critical_radius_wc(double theta, const ScenarioSet& sc,
                                  const Moments& m, const FeasibleRegion& fr,
                                  const SolverOptions& sopts = {},
                                  const BisectOptions& bopts = {});
CriticalRadius critical_radius_bc(double theta, const ScenarioSet& sc,
                                  const Moments& m, const FeasibleRegion& fr,
                                  const SolverOptions& sopts = {},
                                  const BisectOptions& bopts = {});

enum class TrajectoryMode { wc, bc };

// One robustness result per radius (sorted, non-negative). Sequential runs
// warm-start each solve from the previous optimum; parallel runs forfeit
// warm starts but preserve output order. Per-point failures are recorded in
// the row status and do not abort the remaining points.
std::vector<RobustnessResult> trajectory(const std::vector<double>& deltas,
                                         TrajectoryMode mode,
                                         const ScenarioSet& sc,
                                         const Moments& m,
                                         const FeasibleRegion& fr,
                                         const SolverOptions& opts = {},
                                         bool parallel = false);

}  // namespace drpo
