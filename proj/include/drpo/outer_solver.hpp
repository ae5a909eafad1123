#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "drpo/nlp.hpp"
#include "drpo/restrictions.hpp"
#include "drpo/robust_variance.hpp"

namespace drpo {

// Strong admissibility region: w . s0 <= -epsilon (negative initial cost
// with margin) and scen_mean . w >= alpha_tilde (minimum empirical return),
// plus optional portfolio restrictions.
struct FeasibleRegion {
  Eigen::VectorXd s0;
  Eigen::VectorXd scen_mean;
  double alpha_tilde = 0.0;
  double epsilon = 0.0;
  RestrictionSet restrictions;

  double cardinality_eps() const {
    return restrictions.cardinality_epsilon > 0.0
               ? restrictions.cardinality_epsilon
               : epsilon;
  }
};

double default_epsilon(const Eigen::VectorXd& s0);  // 1e-6 ||s0||

FeasibleRegion make_feasible_region(const ScenarioSet& sc, const Moments& m,
                                    double alpha0, double epsilon,
                                    RestrictionSet rs = {});

enum class SolveStatus { optimal, infeasible, unbounded, max_iter };
const char* to_string(SolveStatus s);
SolveStatus solve_status_from_string(const std::string& s);

struct SolverOptions {
  int n_starts = 16;
  uint64_t seed = 0;
  Eigen::VectorXd warm_start;  // empty = none
  double box_halfwidth = 0.0;  // 0 = automatic
  bool allow_fallback = true;
  int enumeration_cap = 12;
};

struct SolverResult {
  Portfolio w_star;
  double objective = 0.0;  // sqrt(w'Sigma w) +/- sqrt(delta)||w|| (unsquared)
  double value = 0.0;      // squared, floored at 0 for the best case
  SolveStatus status = SolveStatus::max_iter;
  double kkt_residual = std::numeric_limits<double>::infinity();
  int restarts_used = 0;
  std::string warning;
};

// Worst case: minimize sqrt(w'Sigma w) + sqrt(delta) ||w|| over the region.
// Convex; solved by a single interior-point descent (projected-subgradient
// fallback when the barrier path fails).
SolverResult solve_wc(const ScenarioSet& sc, const Moments& m,
                      AmbiguityRadius d, const FeasibleRegion& fr,
                      const SolverOptions& opts = {});

// Best case: minimize sqrt(w'Sigma w) - sqrt(delta) ||w||, non-convex.
// Deterministic multistart from Halton points around the Chebyshev center;
// value is floored at zero after optimization. A negative objective proves
// the floored optimum 0 is attained, so such points are reported optimal.
SolverResult solve_bc_multistart(const ScenarioSet& sc, const Moments& m,
                                 AmbiguityRadius d, const FeasibleRegion& fr,
                                 const SolverOptions& opts = {});

enum class ActiveCase { both_active, first_active, second_active };
const char* to_string(ActiveCase c);

// Active-set reduction of the two normalized region constraints
// a'w >= 1 (a = -s0/epsilon) and b'w >= 1 (b = scen_mean/alpha_tilde):
// eliminates the active equalities and rewrites w'Sigma w and ||w||^2 as
// quadratics q1, q2 in the remaining coordinates.
struct ReducedProblem {
  ActiveCase active_case = ActiveCase::both_active;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  nlp::AffineParam basis;
  nlp::Quadratic q1;  // w'Sigma w in reduced coordinates
  nlp::Quadratic q2;  // ||w||^2 in reduced coordinates

  Eigen::VectorXd reconstruct(const Eigen::VectorXd& z) const {
    return basis.lift(z);
  }
};

ReducedProblem reduce_active_set(const FeasibleRegion& fr, const Moments& m,
                                 ActiveCase c);

struct FOfTResult {
  double value = 0.0;
  Eigen::VectorXd minimizer;
};

// Global minimum of q1 over the level set {q2 = t}: secular-equation
// solve of the one-multiplier dual with the hard case handled by an
// eigenvector ridge. Throws RangeError when t is below min q2.
FOfTResult f_of_t(const nlp::Quadratic& q1, const nlp::Quadratic& q2,
                  double t);
double f_of_t(const ReducedProblem& rp, double t);

struct SdpCaseDiagnostic {
  ActiveCase active_case = ActiveCase::both_active;
  bool attempted = false;
  bool valid = false;
  double objective = 0.0;  // unsquared case minimum
  double value = 0.0;      // floored
  double beta1 = 0.0;
  double beta2 = 0.0;
  double stationarity_residual = 0.0;
  Eigen::VectorXd w;
  std::string note;
};

struct SdpPathResult {
  SolverResult result;
  std::vector<SdpCaseDiagnostic> cases;
  int winner = -1;  // index into cases, -1 when fallback was used
  bool fell_back = false;
};

// Appendix-style best-case path: enumerates the three active-set cases,
// solves min over t > 0 of sqrt(f(t)) - sqrt(delta t) by a geometric sweep
// plus golden-section refinement, validates KKT multiplier signs and full
// feasibility on each candidate, and returns the best valid case. Falls
// back to solve_bc_multistart (with a warning) when no case validates.
SdpPathResult solve_bc_sdp_path_detailed(const ScenarioSet& sc,
                                         const Moments& m, AmbiguityRadius d,
                                         const FeasibleRegion& fr,
                                         const SolverOptions& opts = {});
SolverResult solve_bc_sdp_path(const ScenarioSet& sc, const Moments& m,
                               AmbiguityRadius d, const FeasibleRegion& fr,
                               const SolverOptions& opts = {});

// Base region rows (cost margin + mean floor + convex restrictions).
nlp::ConstraintSet region_constraints(const FeasibleRegion& fr);

}  // namespace drpo
