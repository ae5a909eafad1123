#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "drpo/market_data.hpp"

namespace drpo {

// Portfolio weights are share counts; the Euclidean norm is cached because
// every robust-variance formula consumes it.
struct Portfolio {
  Eigen::VectorXd w;
  double norm2 = 0.0;

  Portfolio() = default;
  explicit Portfolio(Eigen::VectorXd weights)
      : w(std::move(weights)), norm2(w.norm()) {}
};

// Squared-Wasserstein transport budget (units: squared price).
struct AmbiguityRadius {
  double delta = 0.0;

  AmbiguityRadius() = default;
  explicit AmbiguityRadius(double d) : delta(d) {
    if (!(d >= 0.0)) throw DomainError("ambiguity radius must be >= 0");
  }
};

struct DualPoint {
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  DualPoint(double l1, double l2) : lambda1(l1), lambda2(l2) {
    if (!(l1 >= 0.0)) throw DomainError("lambda1 must be >= 0");
  }
};

// Scenario set moved within the transport budget, plus the realized
// per-scenario average squared displacement.
struct PerturbedScenarioSet {
  Eigen::MatrixXd scenarios;
  double cost = 0.0;
};

// w' Sigma w.
double base_variance(const Portfolio& w, const Moments& m);

// (sqrt(w'Sigma w) + sqrt(delta) ||w||)^2 : supremum of portfolio variance
// over the Wasserstein ball of radius delta.
double worst_case_variance(const Portfolio& w, const Moments& m,
                           AmbiguityRadius d);

// max(sqrt(w'Sigma w) - sqrt(delta) ||w||, 0)^2 : the matching infimum,
// floored at zero.
double best_case_variance(const Portfolio& w, const Moments& m,
                          AmbiguityRadius d);

// Best-case dual objective H(lambda1, lambda2) =
//   lambda1 delta + lambda2 alpha + (1/N) sum_i Phi(s_i),
//   Phi(s) = -(w.s)^2 - lambda2 (w.s) + (2 w.s + lambda2)^2 ||w||^2
//            / (4 (||w||^2 + lambda1)).
// Minimizing H over lambda1 >= 0, lambda2 recovers the best-case variance
// through -min H - alpha^2.
double dual_objective_bc(DualPoint p, const Portfolio& w, double alpha,
                         AmbiguityRadius d, const ScenarioSet& sc);

struct DualGridResult {
  double min_h = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  int rounds = 0;
};

// Adaptive grid minimization of dual_objective_bc for alpha pinned to the
// empirical portfolio mean. Expands when the minimum sits on a window edge,
// zooms otherwise; H is jointly convex so the local refinement is global.
DualGridResult dual_grid_minimum(const Portfolio& w, AmbiguityRadius d,
                                 const ScenarioSet& sc, int grid_points = 41,
                                 int max_rounds = 48);

// Deviation scaling along w: moves every scenario by
//   c (w.s_i - mean) w / ||w||^2,
// which preserves the portfolio mean, spends exactly the stated transport
// budget, and attains the closed-form variance bound.
PerturbedScenarioSet worst_case_achiever(const Portfolio& w,
                                         const ScenarioSet& sc,
                                         AmbiguityRadius d);
PerturbedScenarioSet best_case_achiever(const Portfolio& w,
                                        const ScenarioSet& sc,
                                        AmbiguityRadius d);

// Seeded random displacement rescaled into the budget; identical seeds give
// identical perturbations.
PerturbedScenarioSet random_feasible_perturbation(const ScenarioSet& sc,
                                                  AmbiguityRadius d,
                                                  uint64_t seed);

// Empirical (1/N) variance of the portfolio values {w . row_i}.
double portfolio_scenario_variance(const Portfolio& w,
                                   const Eigen::MatrixXd& scenarios);

}  // namespace drpo
