#include <doctest.h>

#include <cmath>
#include <random>

#include "drpo/robust_variance.hpp"

using namespace drpo;

namespace {

Moments pair_moments() {
  // scenarios {(1,0),(0,1)}: mean (.5,.5), cov [[.25,-.25],[-.25,.25]]
  Moments m;
  m.mean.resize(2);
  m.mean << 0.5, 0.5;
  m.cov.resize(2, 2);
  m.cov << 0.25, -0.25, -0.25, 0.25;
  m.min_eig = 0.0;
  return m;
}

ScenarioSet pair_scenarios() {
  ScenarioSet sc;
  sc.scenarios.resize(2, 2);
  sc.scenarios << 1, 0, 0, 1;
  sc.s0 = sc.scenarios.row(1).transpose();
  return sc;
}

ScenarioSet random_scenarios(std::mt19937_64& rng, int N, int n) {
  std::normal_distribution<double> gauss(5.0, 1.5);
  ScenarioSet sc;
  sc.scenarios.resize(N, n);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < n; ++j) sc.scenarios(i, j) = gauss(rng);
  }
  sc.s0 = sc.scenarios.row(N - 1).transpose();
  return sc;
}

Eigen::VectorXd random_w(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd w(n);
  for (int j = 0; j < n; ++j) w[j] = gauss(rng);
  if (w.norm() < 1e-6) w[0] = 1.0;
  return w;
}

}  // namespace

TEST_CASE("base variance quadratic form") {
  const Moments m = pair_moments();
  CHECK(base_variance(Portfolio((Eigen::VectorXd(2) << 1, -1).finished()), m) ==
        doctest::Approx(1.0).epsilon(1e-15));

  Moments zero;
  zero.mean = Eigen::VectorXd::Zero(2);
  zero.cov = Eigen::MatrixXd::Zero(2, 2);
  CHECK(base_variance(Portfolio((Eigen::VectorXd(2) << 3, 4).finished()),
                      zero) == 0.0);

  Moments eye;
  eye.mean = Eigen::VectorXd::Zero(2);
  eye.cov = Eigen::MatrixXd::Identity(2, 2);
  CHECK(base_variance(Portfolio((Eigen::VectorXd(2) << 1, 0).finished()),
                      eye) == 1.0);

  CHECK_THROWS_AS(
      base_variance(Portfolio((Eigen::VectorXd(3) << 1, 2, 3).finished()), m),
      DimensionMismatch);
}

TEST_CASE("worst- and best-case closed forms") {
  const Moments m = pair_moments();
  const Portfolio w((Eigen::VectorXd(2) << 1, -1).finished());

  CHECK(worst_case_variance(w, m, AmbiguityRadius(0.5)) ==
        doctest::Approx(4.0).epsilon(1e-14));
  CHECK(best_case_variance(w, m, AmbiguityRadius(0.5)) == 0.0);

  // delta = 0 reduces to the base variance exactly
  CHECK(worst_case_variance(w, m, AmbiguityRadius(0.0)) ==
        base_variance(w, m));
  CHECK(best_case_variance(w, m, AmbiguityRadius(0.0)) == base_variance(w, m));

  Moments eye;
  eye.mean = Eigen::VectorXd::Zero(2);
  eye.cov = Eigen::MatrixXd::Identity(2, 2);
  const Portfolio e1((Eigen::VectorXd(2) << 1, 0).finished());
  CHECK(worst_case_variance(e1, eye, AmbiguityRadius(1.0)) ==
        doctest::Approx(4.0).epsilon(1e-14));
  CHECK(best_case_variance(e1, eye, AmbiguityRadius(0.25)) ==
        doctest::Approx(0.25).epsilon(1e-14));

  CHECK_THROWS_AS(AmbiguityRadius(-0.1), DomainError);
}

TEST_CASE("dual objective: direct substitution at a single scenario") {
  ScenarioSet sc;
  sc.scenarios.resize(1, 2);
  sc.scenarios << 1, 0;
  sc.s0 = sc.scenarios.row(0).transpose();
  const Portfolio w((Eigen::VectorXd(2) << 1, 0).finished());
  const double h = dual_objective_bc(DualPoint(0.0, 0.0), w, 1.0,
                                     AmbiguityRadius(0.0), sc);
  CHECK(h == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(DualPoint(-1.0, 0.0), DomainError);
}

TEST_CASE("dual objective grows along lambda1 at the analytic lambda2") {
  std::mt19937_64 rng(3);
  const ScenarioSet sc = random_scenarios(rng, 8, 3);
  const Portfolio w(random_w(rng, 3));
  const AmbiguityRadius d(0.5);
  const double alpha = (sc.scenarios * w.w).mean();
  const double l2 = -2.0 * alpha;  // C = 0 at alpha = empirical mean
  double prev = dual_objective_bc(DualPoint(1e2, l2), w, alpha, d, sc);
  for (double l1 : {1e4, 1e6, 1e8}) {
    const double h = dual_objective_bc(DualPoint(l1, l2), w, alpha, d, sc);
    CHECK(h > prev);
    prev = h;
  }
}

TEST_CASE("worst-case achiever: hand instance") {
  const ScenarioSet sc = pair_scenarios();
  const Portfolio w((Eigen::VectorXd(2) << 1, -1).finished());
  const auto pert = worst_case_achiever(w, sc, AmbiguityRadius(0.5));
  CHECK(pert.scenarios(0, 0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(pert.scenarios(0, 1) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(pert.scenarios(1, 0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(pert.scenarios(1, 1) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(pert.cost == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(portfolio_scenario_variance(w, pert.scenarios) ==
        doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("best-case achiever: collapse onto the mean hyperplane") {
  const ScenarioSet sc = pair_scenarios();
  const Portfolio w((Eigen::VectorXd(2) << 1, -1).finished());
  const auto pert = best_case_achiever(w, sc, AmbiguityRadius(0.5));
  CHECK(pert.scenarios(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pert.scenarios(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(portfolio_scenario_variance(w, pert.scenarios) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // budget larger than needed: cost stops at sigma^2 / ||w||^2 < delta
  const auto big = best_case_achiever(w, sc, AmbiguityRadius(5.0));
  CHECK(big.cost == doctest::Approx(0.5).epsilon(1e-12));  // 1.0 / 2.0
  CHECK(portfolio_scenario_variance(w, big.scenarios) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("achievers: identity at delta 0 and degenerate base error") {
  const ScenarioSet sc = pair_scenarios();
  const Portfolio w((Eigen::VectorXd(2) << 1, -1).finished());
  const auto pert = worst_case_achiever(w, sc, AmbiguityRadius(0.0));
  CHECK((pert.scenarios - sc.scenarios).cwiseAbs().maxCoeff() == 0.0);
  CHECK(pert.cost == 0.0);

  const Portfolio flat((Eigen::VectorXd(2) << 1, 1).finished());  // w.s const
  CHECK_THROWS_AS(worst_case_achiever(flat, sc, AmbiguityRadius(0.1)),
                  DegenerateBase);
}

TEST_CASE("random perturbation: determinism and budget") {
  std::mt19937_64 rng(17);
  const ScenarioSet sc = random_scenarios(rng, 10, 3);
  const AmbiguityRadius d(0.7);
  const auto a = random_feasible_perturbation(sc, d, 42);
  const auto b = random_feasible_perturbation(sc, d, 42);
  CHECK((a.scenarios - b.scenarios).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.cost <= d.delta + 1e-12);

  const auto zero = random_feasible_perturbation(sc, AmbiguityRadius(0.0), 7);
  CHECK((zero.scenarios - sc.scenarios).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("closed-form properties over random instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const int N = 5 + static_cast<int>(rng() % 26);
    const ScenarioSet sc = random_scenarios(rng, N, n);
    const Moments m = detail::raw_moments(sc);
    const Portfolio w(random_w(rng, n));
    const double base = base_variance(w, m);
    if (!(base > 1e-12)) continue;

    // monotonicity in delta
    double prev_wc = -1.0, prev_bc = std::numeric_limits<double>::infinity();
    for (double delta : {0.0, 0.01, 0.1, 1.0, 10.0}) {
      const double wc = worst_case_variance(w, m, AmbiguityRadius(delta));
      const double bc = best_case_variance(w, m, AmbiguityRadius(delta));
      CHECK(wc >= prev_wc);
      CHECK(bc <= prev_bc);
      prev_wc = wc;
      prev_bc = bc;
    }

    // penalty/benefit symmetry while the best case is positive
    const double sigma = std::sqrt(base);
    const double delta_sym = 0.25 * base / (w.norm2 * w.norm2);
    const AmbiguityRadius ds(delta_sym);
    const double wc = worst_case_variance(w, m, ds);
    const double bc = best_case_variance(w, m, ds);
    REQUIRE(bc > 0.0);
    const double lhs = std::sqrt(wc) - sigma;
    const double rhs = sigma - std::sqrt(bc);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(lhs ==
          doctest::Approx(std::sqrt(delta_sym) * w.norm2).epsilon(1e-12));

    // degree-2 homogeneity
    const double c = 2.75;
    const Portfolio cw(Eigen::VectorXd(c * w.w));
    CHECK(worst_case_variance(cw, m, ds) ==
          doctest::Approx(c * c * wc).epsilon(1e-12));
    CHECK(best_case_variance(cw, m, ds) ==
          doctest::Approx(c * c * bc).epsilon(1e-12));

    // achiever tightness at 1e-9 relative
    const auto pw = worst_case_achiever(w, sc, ds);
    const auto pb = best_case_achiever(w, sc, ds);
    CHECK(portfolio_scenario_variance(w, pw.scenarios) ==
          doctest::Approx(wc).epsilon(1e-9));
    CHECK(portfolio_scenario_variance(w, pb.scenarios) ==
          doctest::Approx(bc).epsilon(1e-9));
    CHECK(pw.cost == doctest::Approx(delta_sym).epsilon(1e-9));

    // sandwich on a couple hundred random perturbations
    for (int s = 0; s < 200; ++s) {
      const auto pert = random_feasible_perturbation(sc, ds, 1000 + s);
      const double v = portfolio_scenario_variance(w, pert.scenarios);
      CHECK(v >= bc - 1e-9 * (1.0 + bc));
      CHECK(v <= wc + 1e-9 * (1.0 + wc));
    }
  }
}

TEST_CASE("dual grid cross-check recovers the best-case closed form") {
  std::mt19937_64 rng(11);
  const ScenarioSet sc = random_scenarios(rng, 12, 3);
  const Moments m = detail::raw_moments(sc);
  const Portfolio w(random_w(rng, 3));
  const double alpha = (sc.scenarios * w.w).mean();
  for (double delta : {0.01, 0.1, 1.0}) {
    const AmbiguityRadius d(delta);
    const DualGridResult g = dual_grid_minimum(w, d, sc);
    const double via_dual = -g.min_h - alpha * alpha;
    const double closed = best_case_variance(w, m, d);
    const double denom = std::max(closed, 1e-6 * (1.0 + alpha * alpha));
    CHECK(std::abs(via_dual - closed) / denom < 1e-3);
  }
}

TEST_CASE("dual objective diverges when alpha leaves the feasibility window") {
  std::mt19937_64 rng(5);
  const ScenarioSet sc = random_scenarios(rng, 10, 3);
  const Portfolio w(random_w(rng, 3));
  const AmbiguityRadius d(0.1);
  const double mean = (sc.scenarios * w.w).mean();
  const double wn2 = w.norm2 * w.norm2;
  // alpha outside the window |alpha - mean| <= sqrt(delta)||w||
  const double alpha = mean + 1.5 * std::sqrt(d.delta) * w.norm2;
  const double C = alpha - mean;
  double prev = std::numeric_limits<double>::infinity();
  for (double l1 : {1e2, 1e3, 1e4, 1e5}) {
    const double l2 = -2.0 * alpha - 2.0 * C * l1 / wn2;
    const double h = dual_objective_bc(DualPoint(l1, l2), w, alpha, d, sc);
    CHECK(h < prev);
    prev = h;
  }
}
