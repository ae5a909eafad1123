#include "drpo/robust_variance.hpp"

#include <cmath>
#include <random>

namespace drpo {

namespace {

void check_dims(const Portfolio& w, int n, const char* what) {
  if (w.w.size() != n) {
    throw DimensionMismatch(std::string(what) + ": portfolio has " +
                            std::to_string(w.w.size()) + " weights, expected " +
                            std::to_string(n));
  }
}

}  // namespace

double base_variance(const Portfolio& w, const Moments& m) {
  check_dims(w, static_cast<int>(m.cov.rows()), "base_variance");
  return w.w.dot(m.cov * w.w);
}

double worst_case_variance(const Portfolio& w, const Moments& m,
                           AmbiguityRadius d) {
  const double s = std::sqrt(base_variance(w, m)) +
                   std::sqrt(d.delta) * w.norm2;
  return s * s;
}

double best_case_variance(const Portfolio& w, const Moments& m,
                          AmbiguityRadius d) {
  const double s = std::sqrt(base_variance(w, m)) -
                   std::sqrt(d.delta) * w.norm2;
  return s > 0.0 ? s * s : 0.0;
}

double dual_objective_bc(DualPoint p, const Portfolio& w, double alpha,
                         AmbiguityRadius d, const ScenarioSet& sc) {
  check_dims(w, sc.n(), "dual_objective_bc");
  const double wn2 = w.norm2 * w.norm2;
  const Eigen::VectorXd v = sc.scenarios * w.w;  // w . s_i
  double phi_sum = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    const double ws = v[i];
    const double num = 2.0 * ws + p.lambda2;
    phi_sum += -ws * ws - p.lambda2 * ws +
               num * num * wn2 / (4.0 * (wn2 + p.lambda1));
  }
  return p.lambda1 * d.delta + p.lambda2 * alpha +
         phi_sum / static_cast<double>(sc.N());
}

DualGridResult dual_grid_minimum(const Portfolio& w, AmbiguityRadius d,
                                 const ScenarioSet& sc, int grid_points,
                                 int max_rounds) {
  check_dims(w, sc.n(), "dual_grid_minimum");
  const double alpha = (sc.scenarios * w.w).mean();
  const double wn2 = w.norm2 * w.norm2;
  const double sigma = std::sqrt(
      portfolio_scenario_variance(w, sc.scenarios));

  // First-order optimum in lambda2 is -2 alpha when alpha equals the
  // empirical portfolio mean; the unconstrained kappa* = sigma ||w|| /
  // sqrt(delta) locates the lambda1 center.
  const double l2_center = -2.0 * alpha;
  double l1_center = 0.0;
  if (d.delta > 0.0) {
    l1_center = std::max(0.0, sigma * w.norm2 / std::sqrt(d.delta) - wn2);
  }

  double r1 = std::max({10.0, 4.0 * l1_center, wn2});
  double r2 = std::max(10.0, 4.0 * std::abs(l2_center));
  double c1 = l1_center, c2 = l2_center;

  DualGridResult best;
  best.min_h = std::numeric_limits<double>::infinity();

  const int G = grid_points;
  for (int round = 0; round < max_rounds; ++round) {
    const double lo1 = std::max(0.0, c1 - r1), hi1 = c1 + r1;
    const double lo2 = c2 - r2, hi2 = c2 + r2;
    int bi = 0, bj = 0;
    double round_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < G; ++i) {
      const double l1 = lo1 + (hi1 - lo1) * i / (G - 1);
      for (int j = 0; j < G; ++j) {
        const double l2 = lo2 + (hi2 - lo2) * j / (G - 1);
        const double h = dual_objective_bc(DualPoint(l1, l2), w, alpha, d, sc);
        if (h < round_min) {
          round_min = h;
          bi = i;
          bj = j;
        }
      }
    }
    const double bl1 = lo1 + (hi1 - lo1) * bi / (G - 1);
    const double bl2 = lo2 + (hi2 - lo2) * bj / (G - 1);
    if (round_min < best.min_h) {
      best.min_h = round_min;
      best.lambda1 = bl1;
      best.lambda2 = bl2;
    }
    best.rounds = round + 1;

    // Edge hit (other than the lambda1 >= 0 clamp): widen, else zoom.
    const bool edge1 = (bi == G - 1) || (bi == 0 && lo1 > 0.0);
    const bool edge2 = (bj == 0 || bj == G - 1);
    if (edge1 || edge2) {
      if (edge1) r1 *= 4.0;
      if (edge2) r2 *= 4.0;
      c1 = bl1;
      c2 = bl2;
      continue;
    }
    c1 = bl1;
    c2 = bl2;
    const double shrink = 3.0 / (G - 1);
    r1 = std::max(r1 * shrink, 0.0);
    r2 = std::max(r2 * shrink, 0.0);
    if (r1 < 1e-11 * (1.0 + std::abs(c1)) &&
        r2 < 1e-11 * (1.0 + std::abs(c2))) {
      break;
    }
  }
  return best;
}

namespace {

PerturbedScenarioSet scale_deviations(const Portfolio& w,
                                      const ScenarioSet& sc, double c) {
  const Eigen::VectorXd v = sc.scenarios * w.w;
  const double mean = v.mean();
  const double wn2 = w.norm2 * w.norm2;

  PerturbedScenarioSet out;
  out.scenarios = sc.scenarios;
  double cost = 0.0;
  for (int i = 0; i < sc.N(); ++i) {
    const double shift = c * (v[i] - mean) / wn2;
    out.scenarios.row(i) += shift * w.w.transpose();
    cost += shift * shift * wn2;
  }
  out.cost = cost / static_cast<double>(sc.N());
  return out;
}

double base_sigma(const Portfolio& w, const ScenarioSet& sc) {
  check_dims(w, sc.n(), "achiever");
  const double var = portfolio_scenario_variance(w, sc.scenarios);
  if (!(var > 0.0)) {
    throw DegenerateBase("portfolio variance is zero under the scenarios");
  }
  return std::sqrt(var);
}

}  // namespace

PerturbedScenarioSet worst_case_achiever(const Portfolio& w,
                                         const ScenarioSet& sc,
                                         AmbiguityRadius d) {
  const double sigma = base_sigma(w, sc);
  const double c = std::sqrt(d.delta) * w.norm2 / sigma;
  return scale_deviations(w, sc, c);
}

PerturbedScenarioSet best_case_achiever(const Portfolio& w,
                                        const ScenarioSet& sc,
                                        AmbiguityRadius d) {
  const double sigma = base_sigma(w, sc);
  const double c = -std::min(1.0, std::sqrt(d.delta) * w.norm2 / sigma);
  return scale_deviations(w, sc, c);
}

PerturbedScenarioSet random_feasible_perturbation(const ScenarioSet& sc,
                                                  AmbiguityRadius d,
                                                  uint64_t seed) {
  sc.validate();
  PerturbedScenarioSet out;
  out.scenarios = sc.scenarios;
  out.cost = 0.0;
  if (d.delta == 0.0) return out;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::MatrixXd displacement(sc.N(), sc.n());
  for (int i = 0; i < sc.N(); ++i) {
    for (int j = 0; j < sc.n(); ++j) displacement(i, j) = gauss(rng);
  }
  const double fraction = unif(rng);  // spend a random share of the budget
  const double raw = displacement.squaredNorm() / static_cast<double>(sc.N());
  if (raw > 0.0) {
    const double scale = std::sqrt(fraction * d.delta / raw);
    displacement *= scale;
    out.scenarios += displacement;
    out.cost = displacement.squaredNorm() / static_cast<double>(sc.N());
  }
  return out;
}

double portfolio_scenario_variance(const Portfolio& w,
                                   const Eigen::MatrixXd& scenarios) {
  if (w.w.size() != scenarios.cols()) {
    throw DimensionMismatch("portfolio_scenario_variance: size mismatch");
  }
  const Eigen::VectorXd v = scenarios * w.w;
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(v.size());
}

}  // namespace drpo
