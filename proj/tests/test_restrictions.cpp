#include <doctest.h>

#include <cmath>

#include "drpo/outer_solver.hpp"
#include "drpo/restrictions.hpp"
#include "oracles.hpp"

using namespace drpo;
namespace dt = drpo::testing;

TEST_CASE("validate reports all violations") {
  RestrictionSet ok;
  CHECK(ok.validate(3).empty());
  CHECK(ok.empty());

  RestrictionSet bad;
  bad.cardinality = 4;  // > n
  bad.min_position = 0.5;
  bad.max_position = 0.2;  // lower > upper
  AllocationGroup g;
  g.indices = {0, 7};
  g.cap = 1.0;
  bad.groups.push_back(g);
  const auto errs = bad.validate(3);
  CHECK(errs.size() == 3);
}

TEST_CASE("convex rows honor the no-restriction sentinels") {
  RestrictionSet rs;
  rs.short_floors = Eigen::VectorXd::Constant(2, -rs.big_m);
  rs.max_position = rs.big_m;
  AllocationGroup g;
  g.indices = {0, 1};
  g.cap = rs.big_m * 2;
  rs.groups.push_back(g);
  const auto cs = convex_constraints(rs, 2);
  CHECK(cs.n_ineq() == 0);
  CHECK(cs.n_eq() == 0);

  RestrictionSet live;
  live.short_floors = Eigen::VectorXd::Zero(2);
  live.max_position = 0.5;
  AllocationGroup g0;
  g0.indices = {0, 1};
  g0.cap = 0.0;
  live.groups.push_back(g0);
  const auto cs2 = convex_constraints(live, 2);
  CHECK(cs2.n_ineq() == 2 + 4);  // floors + split |w_j| <= 0.5
  CHECK(cs2.n_eq() == 1);        // zero-cap group becomes an equality
}

TEST_CASE("nonconvex enumeration counts") {
  RestrictionSet none;
  none.cardinality = 2;
  CHECK(enumerate_nonconvex(none, 2, 0.01).empty());  // m = n

  RestrictionSet card;
  card.cardinality = 1;
  CHECK(enumerate_nonconvex(card, 2, 0.01).size() == 3);  // {}, {0}, {1}

  RestrictionSet minpos;
  minpos.min_position = 0.1;
  CHECK(enumerate_nonconvex(minpos, 2, 0.01).size() == 4);  // sign patterns

  RestrictionSet big;
  big.min_position = 0.1;
  CHECK_THROWS_AS(enumerate_nonconvex(big, 13, 0.01), CapExceeded);
}

TEST_CASE("long-only restriction is honored and matches the quadrant grid") {
  const auto li = dt::load_instance(dt::bundled_small_instances()[1]);  // n2_b
  FeasibleRegion fr = li.fr;
  // short floors at zero require long-only positions; shorting the basket
  // cannot fund a negative-cost portfolio, so relax the cost margin via a
  // negative-price synthetic asset is not available -- instead allow a
  // floor only on the second asset.
  Eigen::VectorXd floors(2);
  floors << -fr.restrictions.big_m, 0.0;
  fr.restrictions.short_floors = floors;

  const AmbiguityRadius d(0.05);
  const SolverResult r = solve_wc(li.sc, li.m, d, fr);
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.w_star.w[1] >= -1e-8);

  const auto grid = dt::grid_search_min(
      dt::robust_objective(li.m, std::sqrt(d.delta)), dt::region_predicate(fr),
      2, li.meta.grid_box, li.meta.grid_steps, 24,
      dt::face_directions(region_constraints(fr), 2));
  REQUIRE(grid.found);
  CHECK(std::abs(r.objective - grid.objective) < 1e-4);

  // restricted optimum can never beat the unrestricted one
  const SolverResult free_r = solve_wc(li.sc, li.m, d, li.fr);
  CHECK(r.value >= free_r.value - 1e-10);
}

TEST_CASE("large-but-finite max position stays inactive") {
  const auto li = dt::load_instance(dt::bundled_small_instances()[2]);  // n3_a
  FeasibleRegion fr = li.fr;
  fr.restrictions.max_position = 0.9 * fr.restrictions.big_m;
  const SolverResult restricted = solve_wc(li.sc, li.m, AmbiguityRadius(0.1), fr);
  const SolverResult plain = solve_wc(li.sc, li.m, AmbiguityRadius(0.1), li.fr);
  REQUIRE(restricted.status == SolveStatus::optimal);
  CHECK(std::abs(restricted.value - plain.value) <=
        1e-8 * std::max(1.0, plain.value));
}

TEST_CASE("no-restriction sentinel set reproduces the plain solve bitwise") {
  const auto li = dt::load_instance(dt::bundled_small_instances()[3]);  // n3_b
  FeasibleRegion fr = li.fr;
  RestrictionSet rs;
  rs.short_floors = Eigen::VectorXd::Constant(3, -rs.big_m);
  rs.min_position = 0.0;
  rs.max_position = rs.big_m;
  rs.cardinality = 3;
  AllocationGroup g;
  g.indices = {0, 1, 2};
  g.cap = rs.big_m * 3;
  rs.groups.push_back(g);
  fr.restrictions = rs;

  const SolverResult a = solve_wc(li.sc, li.m, AmbiguityRadius(0.7), li.fr);
  const SolverResult b = solve_wc(li.sc, li.m, AmbiguityRadius(0.7), fr);
  CHECK(a.value == b.value);
  CHECK(a.objective == b.objective);
  CHECK((a.w_star.w - b.w_star.w).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero-cap group forces the paired weights to cancel") {
  const auto li = dt::load_instance(dt::bundled_small_instances()[2]);  // n3_a
  FeasibleRegion fr = li.fr;
  AllocationGroup g;
  g.indices = {0, 1};
  g.cap = 0.0;
  fr.restrictions.groups.push_back(g);
  const SolverResult r = solve_wc(li.sc, li.m, AmbiguityRadius(0.1), fr);
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(std::abs(r.w_star.w[0] + r.w_star.w[1]) < 1e-8);
}

TEST_CASE("single-name cardinality cannot fund a negative-cost portfolio") {
  // With one tradable name, a short position cannot deliver the positive
  // return floor: every support subregion is empty.
  const auto li = dt::load_instance(dt::bundled_small_instances()[1]);  // n2_b
  FeasibleRegion fr = li.fr;
  fr.restrictions.cardinality = 1;
  fr.restrictions.cardinality_epsilon = 0.05;
  const SolverResult r = solve_wc(li.sc, li.m, AmbiguityRadius(0.01), fr);
  CHECK(r.status == SolveStatus::infeasible);
}

TEST_CASE("cardinality enumeration matches the raw nonconvex grid") {
  const auto li = dt::load_instance(dt::bundled_small_instances()[2]);  // n3_a
  FeasibleRegion fr = li.fr;
  fr.restrictions.cardinality = 2;  // hedged pairs stay feasible
  fr.restrictions.cardinality_epsilon = 0.02;

  const AmbiguityRadius d(0.005);
  const SolverResult r = solve_wc(li.sc, li.m, d, fr);
  REQUIRE(r.status == SolveStatus::optimal);

  const auto grid = dt::grid_search_min(
      dt::robust_objective(li.m, std::sqrt(d.delta)), dt::region_predicate(fr),
      3, li.meta.grid_box, 121, 24,
      dt::face_directions(region_constraints(fr), 3));
  REQUIRE(grid.found);
  CHECK(std::abs(r.objective - grid.objective) < 1e-4);
}

TEST_CASE("min-position enumeration matches the raw nonconvex grid") {
  const auto li = dt::load_instance(dt::bundled_small_instances()[4]);  // n3_c
  FeasibleRegion fr = li.fr;
  fr.restrictions.min_position = 0.05;

  const AmbiguityRadius d(5e-4);
  const SolverResult r = solve_wc(li.sc, li.m, d, fr);
  REQUIRE(r.status == SolveStatus::optimal);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(r.w_star.w[j]) >= 0.05 - 1e-8);

  const auto grid = dt::grid_search_min(
      dt::robust_objective(li.m, std::sqrt(d.delta)), dt::region_predicate(fr),
      3, li.meta.grid_box, 101, 24,
      dt::face_directions(region_constraints(fr), 3));
  REQUIRE(grid.found);
  CHECK(std::abs(r.objective - grid.objective) < 1e-4);
}
