#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "drpo/errors.hpp"

// Small dense NLP toolkit used by the outer portfolio solvers: quadratic
// forms, affine elimination of equality constraints, a log-barrier
// path-following method for sqrt-of-quadratic objectives over linear
// inequalities, a phase-I Chebyshev-center LP, and the projection-based
// first-order methods used as oracles and fallback.
namespace drpo::nlp {

// q(x) = x' P x + 2 p' x + c with P symmetric.
struct Quadratic {
  Eigen::MatrixXd P;
  Eigen::VectorXd p;
  double c = 0.0;

  int dim() const { return static_cast<int>(P.rows()); }
  double eval(const Eigen::VectorXd& x) const {
    return x.dot(P * x) + 2.0 * p.dot(x) + c;
  }
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const {
    return 2.0 * (P * x + p);
  }

  static Quadratic pure(const Eigen::MatrixXd& P);  // x' P x
  static Quadratic squared_norm(int n);             // ||x||^2
};

// Affine parameterization x = x0 + B z with orthonormal columns B.
struct AffineParam {
  Eigen::VectorXd x0;
  Eigen::MatrixXd B;

  int full_dim() const { return static_cast<int>(x0.size()); }
  int reduced_dim() const { return static_cast<int>(B.cols()); }
  Eigen::VectorXd lift(const Eigen::VectorXd& z) const { return x0 + B * z; }
  Eigen::VectorXd project(const Eigen::VectorXd& x) const {
    return B.transpose() * (x - x0);
  }

  static AffineParam identity(int n);
};

// Minimum-norm particular solution of E x = d plus an orthonormal basis of
// the nullspace. Throws InfeasibleRegion when the system is inconsistent.
AffineParam nullspace_param(const Eigen::MatrixXd& E, const Eigen::VectorXd& d);

// Coefficients of q(x0 + B z) as a quadratic in z.
Quadratic restrict_quadratic(const Quadratic& q, const AffineParam& ap);

// Row-wise container for G x <= h and E x = d.
struct ConstraintSet {
  std::vector<Eigen::VectorXd> ineq_g;
  std::vector<double> ineq_h;
  std::vector<Eigen::VectorXd> eq_e;
  std::vector<double> eq_d;

  void add_ineq(const Eigen::VectorXd& g, double h) {
    ineq_g.push_back(g);
    ineq_h.push_back(h);
  }
  void add_eq(const Eigen::VectorXd& e, double d) {
    eq_e.push_back(e);
    eq_d.push_back(d);
  }
  void append(const ConstraintSet& other);

  int n_ineq() const { return static_cast<int>(ineq_g.size()); }
  int n_eq() const { return static_cast<int>(eq_e.size()); }

  Eigen::MatrixXd ineq_matrix(int n) const;
  Eigen::VectorXd ineq_rhs() const;
  Eigen::MatrixXd eq_matrix(int n) const;
  Eigen::VectorXd eq_rhs() const;

  // Max violation of all rows at x (0 when feasible).
  double violation(const Eigen::VectorXd& x) const;
};

// f(x) = sqrt(q1(x)) + rho * sqrt(q2(x)); both quadratics PSD and strictly
// positive on the domain of interest, so f is smooth there.
struct SqrtQuadObjective {
  Quadratic q1;
  Quadratic q2;
  double rho = 0.0;

  double eval(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  void gradient_hessian(const Eigen::VectorXd& x, Eigen::VectorXd& g,
                        Eigen::MatrixXd& H) const;
};

struct BarrierOptions {
  double mu_shrink = 0.2;
  double mu_final_rel = 1e-11;   // scaled by (1 + |f|)
  int max_newton_per_stage = 80;
  int max_stages = 64;
  double q2_cap = std::numeric_limits<double>::infinity();  // cap on q2(x)
};

struct BarrierResult {
  Eigen::VectorXd x;
  double f = 0.0;
  bool converged = false;
  // Scaled residuals: ||grad f + G' nu||_inf / (1 + ||grad f||_inf) and
  // max_i nu_i margin_i / (1 + |f|), with nu from nonnegative least squares
  // on the active rows after a crossover polish.
  double kkt_stationarity = std::numeric_limits<double>::infinity();
  double kkt_complementarity = std::numeric_limits<double>::infinity();
  Eigen::VectorXd multipliers;
  int newton_iters = 0;
};

// Path-following log-barrier minimization of `obj` over {G x <= h}
// (optionally q2(x) <= q2_cap) from a strictly feasible x0. Newton steps
// with Levenberg regularization for the non-convex best-case objective.
BarrierResult barrier_minimize(const SqrtQuadObjective& obj,
                               const Eigen::MatrixXd& G,
                               const Eigen::VectorXd& h,
                               const Eigen::VectorXd& x0,
                               const BarrierOptions& opts = {});

struct InteriorPoint {
  bool feasible = false;
  Eigen::VectorXd x;
  double margin = 0.0;  // Euclidean radius of a feasible ball around x
};

// Phase I: maximizes the normalized slack min_i (h_i - g_i'x)/||g_i|| over a
// box of the given half-width, via a barrier LP. Declares the region
// infeasible when the best margin is not clearly positive.
InteriorPoint chebyshev_interior(const Eigen::MatrixXd& G,
                                 const Eigen::VectorXd& h,
                                 double box_halfwidth);

// Dykstra's alternating projection onto the intersection of halfspaces.
// Converges slowly for near-parallel rows; prefer exact_project for the
// small systems the oracles use.
Eigen::VectorXd dykstra_project(const Eigen::MatrixXd& G,
                                const Eigen::VectorXd& h, Eigen::VectorXd y,
                                int max_sweeps = 4000, double tol = 1e-13);

// Exact Euclidean projection onto {G x <= h} by enumerating candidate
// active subsets (row count must stay small); falls back to Dykstra when
// the enumeration would be too large.
Eigen::VectorXd exact_project(const Eigen::MatrixXd& G,
                              const Eigen::VectorXd& h,
                              const Eigen::VectorXd& y);

struct QpOracleResult {
  Eigen::VectorXd x;
  double value = 0.0;
  bool converged = false;
  int iters = 0;
};

// Accelerated projected-gradient minimization of x' Q x over {G x <= h}.
// Independent of the barrier path; used as the delta = 0 oracle.
QpOracleResult projected_gradient_qp(const Eigen::MatrixXd& Q,
                                     const Eigen::MatrixXd& G,
                                     const Eigen::VectorXd& h,
                                     const Eigen::VectorXd& x0,
                                     int max_iters = 200000,
                                     double stall_tol = 1e-15);

// Projected subgradient descent with best-iterate tracking; robustness
// fallback when the barrier path fails.
Eigen::VectorXd projected_subgradient(const SqrtQuadObjective& obj,
                                      const Eigen::MatrixXd& G,
                                      const Eigen::VectorXd& h,
                                      const Eigen::VectorXd& x0,
                                      int iters = 5000);

// Halton low-discrepancy point in [0,1]^dim (index >= 1).
Eigen::VectorXd halton_point(uint64_t index, int dim);

// Decorrelated stream seed for (seed, stream) pairs.
uint64_t derive_seed(uint64_t seed, uint64_t stream);

}  // namespace drpo::nlp
