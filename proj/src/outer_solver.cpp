#include "drpo/outer_solver.hpp"

#include <algorithm>
#include <cmath>

#include "drpo/log.hpp"

namespace drpo {

double default_epsilon(const Eigen::VectorXd& s0) { return 1e-6 * s0.norm(); }

FeasibleRegion make_feasible_region(const ScenarioSet& sc, const Moments& m,
                                    double alpha0, double epsilon,
                                    RestrictionSet rs) {
  if (m.mean.size() != sc.n()) {
    throw DimensionMismatch("moments and scenario set disagree on n");
  }
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  if (!std::isfinite(alpha0)) throw DomainError("alpha0 must be finite");
  FeasibleRegion fr;
  fr.s0 = sc.s0;
  fr.scen_mean = m.mean;
  fr.alpha_tilde = alpha0;  // relaxed target: empirical mean floor only
  fr.epsilon = epsilon;
  fr.restrictions = std::move(rs);
  return fr;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::max_iter: return "max_iter";
  }
  return "unknown";
}

SolveStatus solve_status_from_string(const std::string& s) {
  if (s == "optimal") return SolveStatus::optimal;
  if (s == "infeasible") return SolveStatus::infeasible;
  if (s == "unbounded") return SolveStatus::unbounded;
  if (s == "max_iter") return SolveStatus::max_iter;
  throw ParseError("unknown solver status '" + s + "'");
}

const char* to_string(ActiveCase c) {
  switch (c) {
    case ActiveCase::both_active: return "both_active";
    case ActiveCase::first_active: return "first_active";
    case ActiveCase::second_active: return "second_active";
  }
  return "unknown";
}

nlp::ConstraintSet region_constraints(const FeasibleRegion& fr) {
  const int n = static_cast<int>(fr.s0.size());
  if (fr.scen_mean.size() != n) {
    throw DimensionMismatch("region s0 / scen_mean size mismatch");
  }
  if (!(fr.epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  auto errs = fr.restrictions.validate(n);
  if (!errs.empty()) {
    std::string joined;
    for (const auto& e : errs) joined += (joined.empty() ? "" : "; ") + e;
    throw DataError("invalid restrictions: " + joined);
  }
  nlp::ConstraintSet cs;
  cs.add_ineq(fr.s0, -fr.epsilon);              // w . s0 <= -epsilon
  cs.add_ineq(-fr.scen_mean, -fr.alpha_tilde);  // mean . w >= alpha_tilde
  cs.append(convex_constraints(fr.restrictions, n));
  return cs;
}

namespace {

constexpr double kKktTol = 1e-6;

struct RegionSolveConfig {
  double rho = 0.0;  // +sqrt(delta), 0, or -sqrt(delta)
  bool convex = true;
  int n_starts = 1;
  Eigen::VectorXd warm_start;  // w-space, may be empty
  double box_halfwidth = 0.0;
  bool allow_fallback = true;
};

double region_scale_floor(const nlp::ConstraintSet& rows) {
  double floor = 0.0;
  for (int i = 0; i < rows.n_ineq(); ++i) {
    if (rows.ineq_h[i] < 0.0) {
      const double gn = rows.ineq_g[i].norm();
      if (gn > 0.0) floor = std::max(floor, -rows.ineq_h[i] / gn);
    }
  }
  return floor;
}

SolverResult evaluate_fixed_point(const Eigen::MatrixXd& Sigma, double rho,
                                  const Eigen::VectorXd& w,
                                  const nlp::ConstraintSet& rows) {
  SolverResult out;
  const double scale = 1.0 + w.norm();
  if (rows.violation(w) > 1e-9 * scale) {
    out.status = SolveStatus::infeasible;
    return out;
  }
  out.w_star = Portfolio(w);
  const double obj = std::sqrt(std::max(w.dot(Sigma * w), 0.0)) +
                     rho * w.norm();
  out.objective = obj;
  out.value = std::max(obj, 0.0) * std::max(obj, 0.0);
  out.status = SolveStatus::optimal;  // unique feasible point
  out.kkt_residual = 0.0;
  out.restarts_used = 1;
  return out;
}

// Minimizes sqrt(w'Sigma w) + rho ||w|| over one convex region described by
// linear rows (equalities eliminated through an affine parameterization).
SolverResult solve_one_region(const Eigen::MatrixXd& Sigma,
                              const nlp::ConstraintSet& rows,
                              const RegionSolveConfig& cfg) {
  const int n = static_cast<int>(Sigma.rows());
  SolverResult out;

  nlp::AffineParam ap;
  try {
    ap = rows.n_eq() > 0
             ? nlp::nullspace_param(rows.eq_matrix(n), rows.eq_rhs())
             : nlp::AffineParam::identity(n);
  } catch (const InfeasibleRegion&) {
    out.status = SolveStatus::infeasible;
    return out;
  }
  const int zdim = ap.reduced_dim();
  if (zdim == 0) return evaluate_fixed_point(Sigma, cfg.rho, ap.x0, rows);

  // Inequality rows in reduced coordinates; rows that vanish under the
  // parameterization are either redundant or witness infeasibility.
  std::vector<Eigen::VectorXd> gz;
  std::vector<double> hz;
  for (int i = 0; i < rows.n_ineq(); ++i) {
    Eigen::VectorXd g = ap.B.transpose() * rows.ineq_g[i];
    const double rhs = rows.ineq_h[i] - rows.ineq_g[i].dot(ap.x0);
    if (g.norm() <= 1e-13 * std::max(1.0, rows.ineq_g[i].norm())) {
      if (rhs < -1e-11 * (1.0 + std::abs(rows.ineq_h[i]))) {
        out.status = SolveStatus::infeasible;
        return out;
      }
      continue;
    }
    gz.push_back(std::move(g));
    hz.push_back(rhs);
  }
  const int mz = static_cast<int>(gz.size());
  Eigen::MatrixXd G(mz, zdim);
  Eigen::VectorXd h(mz);
  for (int i = 0; i < mz; ++i) {
    G.row(i) = gz[i].transpose();
    h[i] = hz[i];
  }

  nlp::SqrtQuadObjective obj;
  obj.q1 = nlp::restrict_quadratic(nlp::Quadratic::pure(Sigma), ap);
  obj.q2 = nlp::restrict_quadratic(nlp::Quadratic::squared_norm(n), ap);
  obj.rho = cfg.rho;

  // Phase I with a box sized from the constraint floor; widen on failure.
  const double floor = region_scale_floor(rows);
  double box = cfg.box_halfwidth > 0.0 ? cfg.box_halfwidth
                                       : 100.0 * (1.0 + floor);
  nlp::InteriorPoint ip;
  for (int attempt = 0; attempt < 4; ++attempt) {
    ip = nlp::chebyshev_interior(G, h, box);
    if (ip.feasible) break;
    box *= 100.0;
  }
  if (!ip.feasible) {
    out.status = SolveStatus::infeasible;
    return out;
  }

  nlp::BarrierOptions bo;
  if (!cfg.convex) {
    const double wnorm = std::sqrt(std::max(obj.q2.eval(ip.x), 0.0));
    bo.q2_cap = std::pow(1e6 * (1.0 + wnorm), 2);
  }

  auto strictly_ok = [&](const Eigen::VectorXd& z) {
    if (mz > 0 && (h - G * z).minCoeff() <= 0.0) return false;
    return obj.q2.eval(z) < bo.q2_cap;
  };

  std::vector<Eigen::VectorXd> starts;
  if (cfg.warm_start.size() == n) {
    Eigen::VectorXd zw = ap.project(cfg.warm_start);
    for (double c : {1.0, 0.9, 0.5, 0.2}) {
      Eigen::VectorXd blend = c * zw + (1.0 - c) * ip.x;
      if (strictly_ok(blend)) {
        starts.push_back(blend);
        break;
      }
    }
  }
  starts.push_back(ip.x);
  const int wanted = cfg.convex ? 1 : std::max(1, cfg.n_starts);
  for (uint64_t k = 1; static_cast<int>(starts.size()) < wanted; ++k) {
    if (k > 4u * static_cast<uint64_t>(wanted)) break;
    Eigen::VectorXd d =
        2.0 * nlp::halton_point(k, zdim) - Eigen::VectorXd::Ones(zdim);
    if (d.norm() > 1.0) d /= d.norm();
    Eigen::VectorXd z = ip.x + 0.8 * ip.margin * d;
    if (strictly_ok(z)) starts.push_back(z);
  }
  if (cfg.convex && starts.size() > 1) starts.resize(1);

  bool have_best = false;
  nlp::BarrierResult best;
  for (const auto& z0 : starts) {
    nlp::BarrierResult r;
    try {
      r = nlp::barrier_minimize(obj, G, h, z0, bo);
    } catch (const NumericalFailure&) {
      continue;
    }
    ++out.restarts_used;
    if (!have_best || r.f < best.f) {
      best = r;
      have_best = true;
    }
  }
  if (!have_best) {
    out.status = SolveStatus::max_iter;
    out.warning = "no barrier run completed";
    return out;
  }

  double kkt = std::max(best.kkt_stationarity, best.kkt_complementarity);
  if (cfg.convex && cfg.allow_fallback && kkt > kKktTol) {
    // Robustness fallback: projected subgradient polish.
    Eigen::VectorXd z = nlp::projected_subgradient(obj, G, h, best.x);
    if (obj.eval(z) < best.f) {
      best.x = z;
      best.f = obj.eval(z);
      out.warning = "projected-subgradient fallback engaged";
    }
  }

  const Eigen::VectorXd w = ap.lift(best.x);
  out.w_star = Portfolio(w);
  out.objective = best.f;
  out.value = std::max(best.f, 0.0) * std::max(best.f, 0.0);
  const double obj_scale = 1.0 + std::abs(best.f);
  if (!cfg.convex && best.f < -1e-12 * obj_scale) {
    // The floored objective max(f,0)^2 is stationary (gradient zero)
    // wherever f < 0, so the floored optimum 0 is attained exactly.
    out.kkt_residual = 0.0;
    out.status = SolveStatus::optimal;
    return out;
  }
  out.kkt_residual = kkt;
  out.status = kkt <= kKktTol ? SolveStatus::optimal : SolveStatus::max_iter;
  return out;
}

SolverResult solve_over_subregions(const Eigen::MatrixXd& Sigma,
                                   const FeasibleRegion& fr,
                                   const RegionSolveConfig& cfg,
                                   const SolverOptions& opts) {
  const int n = static_cast<int>(Sigma.rows());
  const nlp::ConstraintSet base = region_constraints(fr);
  std::vector<SubRegion> subs = enumerate_nonconvex(
      fr.restrictions, n, fr.cardinality_eps(), opts.enumeration_cap);

  if (subs.empty()) return solve_one_region(Sigma, base, cfg);

  SolverResult best;
  best.status = SolveStatus::infeasible;
  bool have = false;
  int restarts = 0;
  for (const auto& sub : subs) {
    nlp::ConstraintSet rows = base;
    rows.append(sub.extra);
    SolverResult r = solve_one_region(Sigma, rows, cfg);
    restarts += r.restarts_used;
    if (r.status == SolveStatus::infeasible) continue;
    const bool better =
        !have || r.value < best.value ||
        (r.value == best.value && r.objective < best.objective);
    if (better) {
      best = r;
      have = true;
    }
  }
  best.restarts_used = restarts;
  return best;
}

void check_problem(const ScenarioSet& sc, const Moments& m,
                   const FeasibleRegion& fr) {
  const int n = sc.n();
  if (m.cov.rows() != n || m.cov.cols() != n || m.mean.size() != n ||
      fr.s0.size() != n || fr.scen_mean.size() != n) {
    throw DimensionMismatch("scenario set, moments and region disagree on n");
  }
  if (!(m.min_eig > 0.0)) {
    throw SingularCovariance("covariance must be positive definite");
  }
  if (!(fr.epsilon > 0.0)) throw DomainError("epsilon must be > 0");
}

}  // namespace

SolverResult solve_wc(const ScenarioSet& sc, const Moments& m,
                      AmbiguityRadius d, const FeasibleRegion& fr,
                      const SolverOptions& opts) {
  check_problem(sc, m, fr);
  RegionSolveConfig cfg;
  cfg.rho = std::sqrt(d.delta);
  cfg.convex = true;
  cfg.n_starts = 1;
  cfg.warm_start = opts.warm_start;
  cfg.box_halfwidth = opts.box_halfwidth;
  cfg.allow_fallback = opts.allow_fallback;
  return solve_over_subregions(m.cov, fr, cfg, opts);
}

SolverResult solve_bc_multistart(const ScenarioSet& sc, const Moments& m,
                                 AmbiguityRadius d, const FeasibleRegion& fr,
                                 const SolverOptions& opts) {
  check_problem(sc, m, fr);
  if (opts.n_starts < 1) throw DomainError("n_starts must be >= 1");
  if (d.delta == 0.0) {
    // Identical problem to the worst case at delta = 0; sharing the code
    // path keeps the two values exactly equal.
    return solve_wc(sc, m, d, fr, opts);
  }
  RegionSolveConfig cfg;
  cfg.rho = -std::sqrt(d.delta);
  cfg.convex = false;
  cfg.n_starts = opts.n_starts;
  cfg.warm_start = opts.warm_start;
  cfg.box_halfwidth = opts.box_halfwidth;
  cfg.allow_fallback = opts.allow_fallback;
  return solve_over_subregions(m.cov, fr, cfg, opts);
}

ReducedProblem reduce_active_set(const FeasibleRegion& fr, const Moments& m,
                                 ActiveCase c) {
  const int n = static_cast<int>(fr.s0.size());
  if (!(fr.epsilon > 0.0)) throw BadNormalization("epsilon must be > 0");
  if (!(fr.alpha_tilde > 0.0)) {
    throw BadNormalization(
        "alpha_tilde must be > 0 for the normalized a'w >= 1 form");
  }
  if (m.cov.rows() != n || fr.scen_mean.size() != n) {
    throw DimensionMismatch("region and moments disagree on n");
  }

  ReducedProblem rp;
  rp.active_case = c;
  rp.a = -fr.s0 / fr.epsilon;
  rp.b = fr.scen_mean / fr.alpha_tilde;

  nlp::ConstraintSet eqs;
  switch (c) {
    case ActiveCase::both_active: {
      if (n < 3) throw DomainError("both_active reduction needs n >= 3");
      const double gram = rp.a.squaredNorm() * rp.b.squaredNorm() -
                          std::pow(rp.a.dot(rp.b), 2);
      if (gram <= 1e-12 * rp.a.squaredNorm() * rp.b.squaredNorm()) {
        throw DegenerateConstraints("cost and return constraints are parallel");
      }
      eqs.add_eq(rp.a, 1.0);
      eqs.add_eq(rp.b, 1.0);
      break;
    }
    case ActiveCase::first_active:
      if (n < 2) throw DomainError("single-active reduction needs n >= 2");
      eqs.add_eq(rp.a, 1.0);
      break;
    case ActiveCase::second_active:
      if (n < 2) throw DomainError("single-active reduction needs n >= 2");
      eqs.add_eq(rp.b, 1.0);
      break;
  }
  rp.basis = nlp::nullspace_param(eqs.eq_matrix(n), eqs.eq_rhs());
  rp.q1 = nlp::restrict_quadratic(nlp::Quadratic::pure(m.cov), rp.basis);
  rp.q2 =
      nlp::restrict_quadratic(nlp::Quadratic::squared_norm(n), rp.basis);
  return rp;
}

namespace {

// Diagonalized equality trust-region solve:
// min y'Ly + 2 beta'y over ||y|| = r with L = diag(lam).
Eigen::VectorXd solve_diag_trs(const Eigen::VectorXd& lam,
                               const Eigen::VectorXd& beta, double r) {
  const int k = static_cast<int>(lam.size());
  Eigen::VectorXd y = Eigen::VectorXd::Zero(k);
  if (r <= 0.0) return y;

  const double lmin = lam.minCoeff();
  const double cluster = 1e-12 * (1.0 + std::abs(lmin));
  const double bscale = 1.0 + beta.norm();

  auto y_at = [&](double nu) {
    Eigen::VectorXd out(k);
    for (int i = 0; i < k; ++i) out[i] = -beta[i] / (lam[i] + nu);
    return out;
  };
  auto phi = [&](double nu) { return y_at(nu).squaredNorm(); };

  // Pseudo-inverse solution at the boundary nu = -lmin.
  double beta_min_sq = 0.0;
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(k);
  int ridge_index = -1;
  for (int i = 0; i < k; ++i) {
    if (lam[i] - lmin <= cluster) {
      beta_min_sq += beta[i] * beta[i];
      if (ridge_index < 0) ridge_index = i;
    } else {
      y0[i] = -beta[i] / (lam[i] - lmin);
    }
  }
  if (std::sqrt(beta_min_sq) <= 1e-13 * bscale) {
    const double n0 = y0.norm();
    if (n0 <= r) {  // hard case: pad with a minimal-eigenvalue direction
      y0[ridge_index] = std::sqrt(std::max(r * r - n0 * n0, 0.0));
      return y0;
    }
  }

  // Regular case: unique root of ||y(nu)|| = r on (-lmin, inf).
  double eps = 1e-10 * (1.0 + std::abs(lmin));
  double lo = -lmin + eps;
  for (int i = 0; i < 200 && phi(lo) <= r * r; ++i) {
    eps *= 1e-2;
    lo = -lmin + eps;
    if (eps < 1e-280) break;
  }
  if (phi(lo) <= r * r) {
    // Flat at the boundary; treat as hard case.
    y = y_at(lo);
    const double n0 = y.norm();
    if (ridge_index >= 0 && n0 < r) {
      y[ridge_index] += std::sqrt(r * r - n0 * n0);
    }
    return y;
  }
  double hi = std::max(1.0, 2.0 * std::abs(lmin));
  for (int i = 0; i < 400 && phi(hi) >= r * r; ++i) hi *= 4.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) > r * r) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-16 * std::max(1.0, std::abs(hi))) break;
  }
  y = y_at(0.5 * (lo + hi));
  const double yn = y.norm();
  if (yn > 0.0) y *= r / yn;  // land exactly on the sphere
  return y;
}

}  // namespace

FOfTResult f_of_t(const nlp::Quadratic& q1, const nlp::Quadratic& q2,
                  double t) {
  const int k = q1.dim();
  if (q2.dim() != k) throw DimensionMismatch("f_of_t: pencil dims disagree");

  FOfTResult res;
  if (k == 0) {
    if (std::abs(t - q2.c) > 1e-9 * std::max(1.0, std::abs(t))) {
      throw RangeError("t not attainable by a zero-dimensional q2");
    }
    res.value = q1.c;
    res.minimizer = Eigen::VectorXd(0);
    return res;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(q2.P);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("f_of_t: q2 is not positive definite");
  }
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::VectorXd xc = -llt.solve(q2.p);  // center of q2
  const double h2 = q2.c + q2.p.dot(xc);        // min of q2
  const double tol_t = 1e-9 * std::max({1.0, std::abs(t), std::abs(h2)});
  if (t < h2 - tol_t) {
    throw RangeError("t below the attainable minimum of q2");
  }
  const double r = std::sqrt(std::max(t - h2, 0.0));

  // y = L'(x - xc); q1 in y-coordinates.
  const Eigen::MatrixXd Linv =
      L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd At =
      (Linv * q1.P * Linv.transpose()).eval();
  const Eigen::MatrixXd A = ((At + At.transpose()) / 2.0).eval();
  const Eigen::VectorXd b = Linv * (q1.P * xc + q1.p);
  const double c0 = q1.eval(xc);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  const Eigen::VectorXd lam = eig.eigenvalues();
  const Eigen::VectorXd beta = eig.eigenvectors().transpose() * b;

  const Eigen::VectorXd yd = solve_diag_trs(lam, beta, r);
  const Eigen::VectorXd y = eig.eigenvectors() * yd;
  res.value = yd.dot(lam.asDiagonal() * yd) + 2.0 * beta.dot(yd) + c0;
  res.minimizer = xc + Linv.transpose() * y;
  return res;
}

double f_of_t(const ReducedProblem& rp, double t) {
  return f_of_t(rp.q1, rp.q2, t).value;
}

namespace {

struct OneDimSearch {
  double t = 0.0;
  double objective = 0.0;  // sqrt(f(t)) - sqrt(delta t)
  Eigen::VectorXd z;
  bool ok = false;
};

// Geometric sweep over t plus golden-section refinement of every local
// bracket; the composite sqrt(f) - sqrt(delta t) is unimodal on each
// monotone piece of the convex f.
OneDimSearch search_over_t(const ReducedProblem& rp, double delta) {
  OneDimSearch best;

  Eigen::LLT<Eigen::MatrixXd> llt(rp.q2.P);
  if (llt.info() != Eigen::Success) return best;
  const Eigen::VectorXd xc = -llt.solve(rp.q2.p);
  const double t_min = rp.q2.c + rp.q2.p.dot(xc);
  if (!(t_min > 0.0)) return best;  // active constraints pin w away from 0

  auto g = [&](double t) { return std::sqrt(std::max(f_of_t(rp, t), 0.0)) -
                                  std::sqrt(delta * t); };

  double span = 1e10;
  const int points = 241;
  std::vector<double> ts, gs;
  auto sweep = [&]() {
    ts.clear();
    gs.clear();
    for (int i = 0; i < points; ++i) {
      const double t = t_min * std::pow(span, i / double(points - 1));
      ts.push_back(t);
      gs.push_back(g(t));
    }
  };
  sweep();
  // Extend while the minimum hugs the far end of the sweep.
  for (int guard = 0; guard < 3; ++guard) {
    const auto it = std::min_element(gs.begin(), gs.end());
    if (it != gs.end() - 1) break;
    span *= 1e4;
    if (span > 1e26) break;
    sweep();
  }

  auto golden = [&](double lo, double hi) {
    // Golden section in log t, relative tolerance 1e-8.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log(lo), bq = std::log(hi);
    double x1 = bq - gr * (bq - a), x2 = a + gr * (bq - a);
    double f1 = g(std::exp(x1)), f2 = g(std::exp(x2));
    for (int it = 0; it < 200 && (bq - a) > 1e-8; ++it) {
      if (f1 <= f2) {
        bq = x2;
        x2 = x1;
        f2 = f1;
        x1 = bq - gr * (bq - a);
        f1 = g(std::exp(x1));
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (bq - a);
        f2 = g(std::exp(x2));
      }
    }
    return std::exp(0.5 * (a + bq));
  };

  auto consider = [&](double t) {
    const double val = g(t);
    if (!best.ok || val < best.objective) {
      best.ok = true;
      best.t = t;
      best.objective = val;
    }
  };
  consider(ts.front());
  consider(ts.back());
  for (int i = 1; i + 1 < points; ++i) {
    if (gs[i] <= gs[i - 1] && gs[i] <= gs[i + 1]) {
      consider(golden(ts[i - 1], ts[i + 1]));
    }
  }
  if (best.ok) {
    best.z = f_of_t(rp.q1, rp.q2, best.t).minimizer;
    best.objective = g(best.t);
  }
  return best;
}

Eigen::VectorXd bc_gradient(const Eigen::MatrixXd& Sigma, double delta,
                            const Eigen::VectorXd& w) {
  const double sigma = std::sqrt(std::max(w.dot(Sigma * w), 1e-300));
  const double wn = std::max(w.norm(), 1e-300);
  return Sigma * w / sigma - std::sqrt(delta) * w / wn;
}

}  // namespace

SdpPathResult solve_bc_sdp_path_detailed(const ScenarioSet& sc,
                                         const Moments& m, AmbiguityRadius d,
                                         const FeasibleRegion& fr,
                                         const SolverOptions& opts) {
  check_problem(sc, m, fr);
  SdpPathResult out;
  const int n = sc.n();

  auto fall_back = [&](const std::string& why) {
    out.fell_back = true;
    out.result = solve_bc_multistart(sc, m, d, fr, opts);
    out.result.warning = "active-set path fallback (" + why + ")" +
                         (out.result.warning.empty()
                              ? ""
                              : "; " + out.result.warning);
    return out;
  };

  if (!(fr.alpha_tilde > 0.0)) {
    return fall_back("alpha_tilde <= 0 breaks the normalized form");
  }

  const nlp::ConstraintSet full_rows = region_constraints(fr);
  const Eigen::VectorXd a = -fr.s0 / fr.epsilon;
  const Eigen::VectorXd b = fr.scen_mean / fr.alpha_tilde;

  const ActiveCase order[] = {ActiveCase::both_active,
                              ActiveCase::first_active,
                              ActiveCase::second_active};
  for (ActiveCase c : order) {
    SdpCaseDiagnostic diag;
    diag.active_case = c;

    Eigen::VectorXd w;
    double objective = 0.0;
    try {
      if (c == ActiveCase::both_active && n == 2) {
        // Two constraints pin the portfolio completely.
        Eigen::Matrix2d M;
        M.row(0) = a.transpose();
        M.row(1) = b.transpose();
        if (std::abs(M.determinant()) <=
            1e-12 * a.norm() * b.norm()) {
          throw DegenerateConstraints("parallel active constraints");
        }
        w = M.colPivHouseholderQr().solve(Eigen::Vector2d(1.0, 1.0));
        diag.attempted = true;
        objective = std::sqrt(std::max(w.dot(m.cov * w), 0.0)) -
                    std::sqrt(d.delta) * w.norm();
      } else {
        ReducedProblem rp = reduce_active_set(fr, m, c);
        diag.attempted = true;
        OneDimSearch s = search_over_t(rp, d.delta);
        if (!s.ok) {
          diag.note = "one-dimensional search failed";
          out.cases.push_back(diag);
          continue;
        }
        w = rp.reconstruct(s.z);
        objective = s.objective;
      }
    } catch (const Error& e) {
      diag.note = e.what();
      out.cases.push_back(diag);
      continue;
    }

    diag.w = w;
    diag.objective = objective;
    diag.value = std::max(objective, 0.0) * std::max(objective, 0.0);

    // Validity: full-region feasibility plus KKT multiplier signs on the
    // assumed-active constraints.
    const double wscale = 1.0 + w.norm();
    bool valid = full_rows.violation(w) <= 1e-7 * wscale &&
                 satisfies_raw(fr.restrictions, w, fr.cardinality_eps());

    const Eigen::VectorXd grad = bc_gradient(m.cov, d.delta, w);
    const double gscale = 1.0 + grad.norm();
    if (valid && objective >= -1e-12 * (1.0 + std::abs(objective))) {
      Eigen::MatrixXd X;
      if (c == ActiveCase::both_active) {
        X.resize(n, 2);
        X.col(0) = a;
        X.col(1) = b;
      } else {
        X.resize(n, 1);
        X.col(0) = (c == ActiveCase::first_active) ? a : b;
      }
      const Eigen::VectorXd betas =
          X.colPivHouseholderQr().solve(grad);
      diag.stationarity_residual = (grad - X * betas).norm();
      diag.beta1 = (c == ActiveCase::second_active) ? 0.0 : betas[0];
      diag.beta2 = (c == ActiveCase::both_active)
                       ? betas[1]
                       : (c == ActiveCase::second_active ? betas[0] : 0.0);
      const double beta_tol = 1e-6 * (1.0 + std::abs(diag.beta1) +
                                      std::abs(diag.beta2));
      valid = diag.stationarity_residual <= 1e-5 * gscale &&
              diag.beta1 >= -beta_tol && diag.beta2 >= -beta_tol;
    }
    // Negative objective: the floored value 0 is attained, stationarity of
    // the unsquared objective is not required.
    diag.valid = valid;
    out.cases.push_back(diag);
  }

  for (size_t i = 0; i < out.cases.size(); ++i) {
    const auto& diag = out.cases[i];
    if (!diag.valid) continue;
    if (out.winner < 0 || diag.value < out.cases[out.winner].value ||
        (diag.value == out.cases[out.winner].value &&
         diag.objective < out.cases[out.winner].objective)) {
      out.winner = static_cast<int>(i);
    }
  }
  if (out.winner < 0) return fall_back("no active-set case validated");

  const auto& win = out.cases[out.winner];
  SolverResult res;
  res.w_star = Portfolio(win.w);
  res.objective = win.objective;
  res.value = win.value;
  res.status = SolveStatus::optimal;
  res.kkt_residual =
      win.objective < 0.0 ? 0.0 : win.stationarity_residual;
  res.restarts_used = static_cast<int>(out.cases.size());
  out.result = std::move(res);
  return out;
}

SolverResult solve_bc_sdp_path(const ScenarioSet& sc, const Moments& m,
                               AmbiguityRadius d, const FeasibleRegion& fr,
                               const SolverOptions& opts) {
  return solve_bc_sdp_path_detailed(sc, m, d, fr, opts).result;
}

}  // namespace drpo
