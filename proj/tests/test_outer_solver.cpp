#include <doctest.h>

#include <cmath>
#include <random>

#include "drpo/outer_solver.hpp"
#include "drpo/verify.hpp"
#include "oracles.hpp"

using namespace drpo;
namespace dt = drpo::testing;

namespace {

// Synthetic three-asset problem with abstract (sign-free) region vectors.
FeasibleRegion axis_region(double eps, double alpha) {
  FeasibleRegion fr;
  fr.s0 = (Eigen::VectorXd(3) << -eps, 0, 0).finished();       // a = (1,0,0)
  fr.scen_mean = (Eigen::VectorXd(3) << 0, alpha, 0).finished();  // b = (0,1,0)
  fr.alpha_tilde = alpha;
  fr.epsilon = eps;
  return fr;
}

Moments moments_from(const Eigen::MatrixXd& cov) {
  Moments m;
  m.cov = cov;
  m.mean = Eigen::VectorXd::Zero(cov.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  m.min_eig = eig.eigenvalues().minCoeff();
  return m;
}

}  // namespace

TEST_CASE("single-asset region with positive return floor is infeasible") {
  ScenarioSet sc;
  sc.scenarios.resize(2, 1);
  sc.scenarios << 1.1, 0.9;
  sc.s0 = (Eigen::VectorXd(1) << 1.0).finished();
  const Moments m = empirical_moments(sc);
  const FeasibleRegion fr = make_feasible_region(sc, m, 0.1, 0.01);
  const SolverResult r = solve_wc(sc, m, AmbiguityRadius(0.0), fr);
  CHECK(r.status == SolveStatus::infeasible);
}

TEST_CASE("delta=0: worst and best case share the exact same value") {
  for (const auto& meta : dt::bundled_small_instances()) {
    const auto li = dt::load_instance(meta);
    const SolverResult wc = solve_wc(li.sc, li.m, AmbiguityRadius(0.0), li.fr);
    const SolverResult bc =
        solve_bc_multistart(li.sc, li.m, AmbiguityRadius(0.0), li.fr);
    REQUIRE(wc.status == SolveStatus::optimal);
    CHECK(wc.value == bc.value);  // bitwise: same code path
    CHECK(wc.objective == bc.objective);

    const double oracle = qp_oracle_min_variance(li.m, li.fr);
    CHECK(std::abs(wc.value - oracle) <= 1e-6 * std::max(1.0, oracle));
  }
}

TEST_CASE("grid oracle agreement on one bundled instance per size") {
  for (const auto& name : {std::string("n2_b"), std::string("n3_a")}) {
    const auto& all = dt::bundled_small_instances();
    const auto meta = *std::find_if(all.begin(), all.end(),
                                    [&](const auto& b) { return b.name == name; });
    const auto li = dt::load_instance(meta);
    const auto feasible = dt::region_predicate(li.fr);
    const auto rows = region_constraints(li.fr);
    const auto dirs = dt::face_directions(rows, li.sc.n());

    const double dwc = meta.deltas_wc.back();
    const SolverResult rwc = solve_wc(li.sc, li.m, AmbiguityRadius(dwc), li.fr);
    REQUIRE(rwc.status == SolveStatus::optimal);
    const auto gwc = dt::grid_search_min(
        dt::robust_objective(li.m, std::sqrt(dwc)), feasible, li.sc.n(),
        meta.grid_box, meta.grid_steps, 24, dirs, &rows);
    REQUIRE(gwc.found);
    CHECK(std::abs(rwc.objective - gwc.objective) < 1e-4);

    const double dbc = meta.deltas_bc.back();
    const SolverResult rbc =
        solve_bc_multistart(li.sc, li.m, AmbiguityRadius(dbc), li.fr);
    REQUIRE(rbc.status == SolveStatus::optimal);
    const auto gbc = dt::grid_search_min(
        dt::robust_objective(li.m, -std::sqrt(dbc)), feasible, li.sc.n(),
        meta.grid_box, meta.grid_steps, 24, dirs, &rows);
    REQUIRE(gbc.found);
    CHECK(std::abs(rbc.objective - gbc.objective) < 1e-4);
  }
}

TEST_CASE("best case past the arbitrage onset floors the value at zero") {
  const auto li = dt::load_instance(dt::bundled_small_instances()[2]);  // n3_a
  // delta far above the base objective scale forces a negative objective.
  const SolverResult r =
      solve_bc_multistart(li.sc, li.m, AmbiguityRadius(1.0), li.fr);
  CHECK(r.status == SolveStatus::optimal);
  CHECK(r.objective < 0.0);
  CHECK(r.value == 0.0);
  CHECK(r.kkt_residual == 0.0);
}

TEST_CASE("worst-case solution is a certified local minimum") {
  const auto li = dt::load_instance(dt::bundled_small_instances()[1]);  // n2_b
  const AmbiguityRadius d(0.3);
  const SolverResult r = solve_wc(li.sc, li.m, d, li.fr);
  REQUIRE(r.status == SolveStatus::optimal);
  REQUIRE(r.kkt_residual <= 1e-6);

  // feasibility of the reported optimum
  CHECK(li.fr.s0.dot(r.w_star.w) <= -li.fr.epsilon + 1e-8);
  CHECK(li.fr.scen_mean.dot(r.w_star.w) >= li.fr.alpha_tilde - 1e-8);

  const auto obj = dt::robust_objective(li.m, std::sqrt(d.delta));
  const nlp::ConstraintSet rows = region_constraints(li.fr);
  const Eigen::MatrixXd G = rows.ineq_matrix(li.sc.n());
  const Eigen::VectorXd h = rows.ineq_rhs();
  const double f0 = obj(r.w_star.w);

  std::mt19937_64 rng(123);
  std::normal_distribution<double> gauss;
  int tested = 0;
  for (int k = 0; k < 1000; ++k) {
    Eigen::VectorXd dvec(li.sc.n());
    for (int j = 0; j < li.sc.n(); ++j) dvec[j] = gauss(rng);
    dvec *= 1e-4 / dvec.norm();
    Eigen::VectorXd wp = r.w_star.w + dvec;
    if (((G * wp - h).array() > 0.0).any()) {
      wp = nlp::exact_project(G, h, wp);
    }
    ++tested;
    CHECK(obj(wp) >= f0 - 1e-8);
  }
  CHECK(tested == 1000);
}

TEST_CASE("objective scales linearly with the region normalization") {
  const auto li = dt::load_instance(dt::bundled_small_instances()[3]);  // n3_b
  const AmbiguityRadius d(0.2);
  const SolverResult base = solve_wc(li.sc, li.m, d, li.fr);
  REQUIRE(base.status == SolveStatus::optimal);

  const double c = 3.0;
  FeasibleRegion scaled = li.fr;
  scaled.epsilon *= c;
  scaled.alpha_tilde *= c;
  const SolverResult big = solve_wc(li.sc, li.m, d, scaled);
  REQUIRE(big.status == SolveStatus::optimal);
  CHECK(big.objective ==
        doctest::Approx(c * base.objective).epsilon(1e-6));
  CHECK((big.w_star.w - c * base.w_star.w).norm() <
        1e-5 * (1.0 + c * base.w_star.w.norm()));
}

TEST_CASE("values are monotone in the ambiguity radius") {
  const auto li = dt::load_instance(dt::bundled_small_instances()[4]);  // n3_c
  double prev_wc = -1.0;
  double prev_bc = std::numeric_limits<double>::infinity();
  Eigen::VectorXd warm_wc, warm_bc;
  for (double delta : {0.0, 1e-4, 1e-3, 1e-2, 0.1}) {
    SolverOptions o;
    o.warm_start = warm_wc;
    const SolverResult wc = solve_wc(li.sc, li.m, AmbiguityRadius(delta), li.fr, o);
    REQUIRE(wc.status == SolveStatus::optimal);
    CHECK(wc.value >= prev_wc - 1e-10);
    prev_wc = wc.value;
    warm_wc = wc.w_star.w;

    SolverOptions ob;
    ob.warm_start = warm_bc;
    const SolverResult bc =
        solve_bc_multistart(li.sc, li.m, AmbiguityRadius(delta), li.fr, ob);
    REQUIRE(bc.status == SolveStatus::optimal);
    CHECK(bc.value <= prev_bc + 1e-10);
    prev_bc = bc.value;
    if (bc.w_star.w.size() > 0) warm_bc = bc.w_star.w;
  }
}

TEST_CASE("reduce_active_set on coordinate constraints") {
  const FeasibleRegion fr = axis_region(0.01, 0.5);
  Eigen::MatrixXd cov(3, 3);
  cov << 2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0;
  const Moments m = moments_from(cov);

  const ReducedProblem rp =
      reduce_active_set(fr, m, ActiveCase::both_active);
  CHECK(rp.basis.reduced_dim() == 1);

  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd z(1);
    z << 3.0 * gauss(rng);
    const Eigen::VectorXd w = rp.reconstruct(z);
    CHECK(std::abs(rp.a.dot(w) - 1.0) < 1e-12);
    CHECK(std::abs(rp.b.dot(w) - 1.0) < 1e-12);
    CHECK(rp.q2.eval(z) == doctest::Approx(w.squaredNorm()).epsilon(1e-12));
    CHECK(rp.q1.eval(z) == doctest::Approx(w.dot(cov * w)).epsilon(1e-12));
  }
  // w = (1, 1, free) for these axes
  const Eigen::VectorXd w0 = rp.reconstruct(Eigen::VectorXd::Zero(1));
  CHECK(w0[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w0[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reduce_active_set input validation") {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(3, 3);
  const Moments m = moments_from(cov);

  FeasibleRegion parallel;
  parallel.s0 = (Eigen::VectorXd(3) << -1, -1, 0).finished();
  parallel.scen_mean = (Eigen::VectorXd(3) << 1, 1, 0).finished();
  parallel.alpha_tilde = 1.0;
  parallel.epsilon = 1.0;
  CHECK_THROWS_AS(reduce_active_set(parallel, m, ActiveCase::both_active),
                  DegenerateConstraints);

  FeasibleRegion bad = axis_region(0.01, -0.5);
  bad.alpha_tilde = -0.5;
  CHECK_THROWS_AS(reduce_active_set(bad, m, ActiveCase::both_active),
                  BadNormalization);

  Eigen::MatrixXd cov2 = Eigen::MatrixXd::Identity(2, 2);
  const Moments m2 = moments_from(cov2);
  FeasibleRegion fr2;
  fr2.s0 = (Eigen::VectorXd(2) << -1, 0).finished();
  fr2.scen_mean = (Eigen::VectorXd(2) << 0, 1).finished();
  fr2.alpha_tilde = 1.0;
  fr2.epsilon = 1.0;
  CHECK_THROWS_AS(reduce_active_set(fr2, m2, ActiveCase::both_active),
                  DomainError);
  CHECK_NOTHROW(reduce_active_set(fr2, m2, ActiveCase::first_active));
}

TEST_CASE("f_of_t: identical forms give f(t) = t") {
  nlp::Quadratic q1, q2;
  q1.P = Eigen::MatrixXd::Identity(1, 1);
  q1.p = Eigen::VectorXd::Zero(1);
  q2 = q1;
  for (double t : {0.25, 1.0, 9.0}) {
    CHECK(f_of_t(q1, q2, t).value == doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("f_of_t: shifted quadratic picks the closer root") {
  nlp::Quadratic q1, q2;
  q1.P = Eigen::MatrixXd::Identity(1, 1);
  q1.p = (Eigen::VectorXd(1) << -1.0).finished();  // (x-1)^2
  q1.c = 1.0;
  q2.P = Eigen::MatrixXd::Identity(1, 1);
  q2.p = Eigen::VectorXd::Zero(1);
  for (double t : {0.25, 1.0, 4.0, 16.0}) {
    const double expect = std::pow(std::sqrt(t) - 1.0, 2);
    CHECK(f_of_t(q1, q2, t).value == doctest::Approx(expect).epsilon(1e-10));
  }
  CHECK_THROWS_AS(f_of_t(q1, q2, -0.5), RangeError);
}

TEST_CASE("f_of_t matches the dense sphere oracle on random pencils") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 6; ++trial) {
    const int k = 3;
    Eigen::MatrixXd A(k, k), B(k, k);
    for (int i = 0; i < k * k; ++i) {
      A(i / k, i % k) = gauss(rng);
      B(i / k, i % k) = gauss(rng);
    }
    nlp::Quadratic q1, q2;
    q1.P = A.transpose() * A + 0.05 * Eigen::MatrixXd::Identity(k, k);
    q1.p = (Eigen::VectorXd(k) << gauss(rng), gauss(rng), gauss(rng)).finished();
    q1.c = 2.0;
    q2.P = B.transpose() * B + 0.5 * Eigen::MatrixXd::Identity(k, k);
    q2.p = (Eigen::VectorXd(k) << gauss(rng), gauss(rng), gauss(rng)).finished();
    q2.c = 1.0;

    Eigen::LLT<Eigen::MatrixXd> llt(q2.P);
    const Eigen::VectorXd xc = -llt.solve(q2.p);
    const double tmin = q2.c + q2.p.dot(xc);
    for (double offset : {0.3, 1.5, 8.0}) {
      const double t = tmin + offset;
      const double exact = f_of_t(q1, q2, t).value;
      const double sampled = dt::sphere_min_oracle(q1, q2, t, 200000);
      CHECK(exact <= sampled + 1e-9);
      CHECK(std::abs(exact - sampled) <
            1e-4 * std::max(1.0, std::abs(sampled)));
    }
  }
}

TEST_CASE("f_of_t hard case: centered pencil needs the eigenvector ridge") {
  nlp::Quadratic q1, q2;
  q1.P = (Eigen::MatrixXd(2, 2) << 1.0, 0.0, 0.0, 4.0).finished();
  q1.p = (Eigen::VectorXd(2) << 0.0, 1.0).finished();  // no component on e1
  q1.c = 0.0;
  q2 = nlp::Quadratic::squared_norm(2);
  // For large t the minimizer rides the small-eigenvalue direction e1.
  const double t = 100.0;
  const auto r = f_of_t(q1, q2, t);
  const double sampled = dt::sphere_min_oracle(q1, q2, t, 400000);
  CHECK(std::abs(r.value - sampled) < 1e-4 * std::max(1.0, sampled));
  CHECK(r.minimizer.squaredNorm() == doctest::Approx(t).epsilon(1e-9));
}

TEST_CASE("active-set path agrees with multistart on the n=3 instances") {
  for (const auto& meta : dt::bundled_small_instances()) {
    const auto li = dt::load_instance(meta);
    if (li.sc.n() != 3) continue;
    for (double delta : meta.deltas_bc) {
      const SdpPathResult path =
          solve_bc_sdp_path_detailed(li.sc, li.m, AmbiguityRadius(delta), li.fr);
      const SolverResult ms =
          solve_bc_multistart(li.sc, li.m, AmbiguityRadius(delta), li.fr);
      REQUIRE(path.result.status == SolveStatus::optimal);
      REQUIRE(ms.status == SolveStatus::optimal);
      const double scale = std::max({1e-12, std::abs(ms.value), ms.value});
      CHECK(std::abs(path.result.value - ms.value) <=
            1e-4 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("active-set path at delta=0 equals the QP oracle") {
  const auto li = dt::load_instance(dt::bundled_small_instances()[3]);  // n3_b
  const SdpPathResult path =
      solve_bc_sdp_path_detailed(li.sc, li.m, AmbiguityRadius(0.0), li.fr);
  REQUIRE(path.result.status == SolveStatus::optimal);
  const double oracle = qp_oracle_min_variance(li.m, li.fr);
  CHECK(std::abs(path.result.value - oracle) <= 1e-6 * std::max(1.0, oracle));
}

TEST_CASE("single-active case wins when the return floor is slack") {
  // Identity covariance: the cost-only optimum is the min-norm point
  // w = a / ||a||^2 = (1,0,0), whose mean return 1 clears the tiny floor.
  ScenarioSet sc;
  sc.scenarios.resize(4, 3);
  sc.scenarios << 2, 1, 1, 0, 1, 1, 1, 2, 1, 1, 0, 1;  // placeholder rows
  sc.s0 = (Eigen::VectorXd(3) << -1, 0, 0).finished();
  Moments m;
  m.cov = Eigen::MatrixXd::Identity(3, 3);
  m.mean = (Eigen::VectorXd(3) << 1.0, 0.2, 0.1).finished();
  m.min_eig = 1.0;
  FeasibleRegion fr;
  fr.s0 = sc.s0;
  fr.scen_mean = m.mean;
  fr.alpha_tilde = 1e-3;
  fr.epsilon = 1.0;  // a = -s0/eps = (1,0,0)

  const SdpPathResult path =
      solve_bc_sdp_path_detailed(sc, m, AmbiguityRadius(0.25), fr);
  REQUIRE_FALSE(path.fell_back);
  REQUIRE(path.winner >= 0);
  CHECK(path.cases[path.winner].active_case == ActiveCase::first_active);
  CHECK(path.result.objective == doctest::Approx(0.5).epsilon(1e-6));
  for (const auto& c : path.cases) {
    if (c.active_case != ActiveCase::both_active || !c.attempted) continue;
    const bool worse_or_invalid =
        !c.valid || c.value >= path.cases[path.winner].value - 1e-12;
    CHECK(worse_or_invalid);
  }
}

TEST_CASE("active-set path falls back when the normalization breaks") {
  const auto li = dt::load_instance(dt::bundled_small_instances()[2]);
  FeasibleRegion fr = li.fr;
  fr.alpha_tilde = 0.0;  // b = mean/alpha undefined
  const SdpPathResult path =
      solve_bc_sdp_path_detailed(li.sc, li.m, AmbiguityRadius(0.01), fr);
  CHECK(path.fell_back);
  CHECK_FALSE(path.result.warning.empty());
  CHECK(path.result.status == SolveStatus::optimal);
}

TEST_CASE("warm start does not change the optimum") {
  const auto li = dt::load_instance(dt::bundled_small_instances()[1]);
  const AmbiguityRadius d(0.01);
  const SolverResult cold = solve_wc(li.sc, li.m, d, li.fr);
  SolverOptions o;
  const SolverResult other = solve_wc(li.sc, li.m, AmbiguityRadius(0.5), li.fr);
  o.warm_start = other.w_star.w;
  const SolverResult warm = solve_wc(li.sc, li.m, d, li.fr, o);
  CHECK(std::abs(cold.value - warm.value) <=
        1e-8 * std::max(1.0, cold.value));
}
