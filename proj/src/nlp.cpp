#include "drpo/nlp.hpp"

#include <algorithm>
#include <cmath>

#include "drpo/log.hpp"

namespace drpo::nlp {

Quadratic Quadratic::pure(const Eigen::MatrixXd& P) {
  Quadratic q;
  q.P = (P + P.transpose()) / 2.0;
  q.p = Eigen::VectorXd::Zero(P.rows());
  q.c = 0.0;
  return q;
}

Quadratic Quadratic::squared_norm(int n) {
  return pure(Eigen::MatrixXd::Identity(n, n));
}

AffineParam AffineParam::identity(int n) {
  AffineParam ap;
  ap.x0 = Eigen::VectorXd::Zero(n);
  ap.B = Eigen::MatrixXd::Identity(n, n);
  return ap;
}

AffineParam nullspace_param(const Eigen::MatrixXd& E,
                            const Eigen::VectorXd& d) {
  const int n = static_cast<int>(E.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      E, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const double smax = svd.singularValues().size() > 0
                          ? svd.singularValues()(0)
                          : 0.0;
  const double tol = std::max(E.rows(), E.cols()) * smax *
                     std::numeric_limits<double>::epsilon() * 16.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > tol) ++rank;
  }

  AffineParam ap;
  ap.x0 = svd.solve(d);  // min-norm least-squares solution
  if ((E * ap.x0 - d).norm() > 1e-9 * (1.0 + d.norm())) {
    throw InfeasibleRegion("equality constraints are inconsistent");
  }
  ap.B = svd.matrixV().rightCols(n - rank);
  return ap;
}

Quadratic restrict_quadratic(const Quadratic& q, const AffineParam& ap) {
  Quadratic r;
  const Eigen::VectorXd Px0_p = q.P * ap.x0 + q.p;
  r.P = ap.B.transpose() * q.P * ap.B;
  r.P = ((r.P + r.P.transpose()) / 2.0).eval();
  r.p = ap.B.transpose() * Px0_p;
  r.c = ap.x0.dot(q.P * ap.x0) + 2.0 * q.p.dot(ap.x0) + q.c;
  return r;
}

void ConstraintSet::append(const ConstraintSet& other) {
  ineq_g.insert(ineq_g.end(), other.ineq_g.begin(), other.ineq_g.end());
  ineq_h.insert(ineq_h.end(), other.ineq_h.begin(), other.ineq_h.end());
  eq_e.insert(eq_e.end(), other.eq_e.begin(), other.eq_e.end());
  eq_d.insert(eq_d.end(), other.eq_d.begin(), other.eq_d.end());
}

Eigen::MatrixXd ConstraintSet::ineq_matrix(int n) const {
  Eigen::MatrixXd G(n_ineq(), n);
  for (int i = 0; i < n_ineq(); ++i) G.row(i) = ineq_g[i].transpose();
  return G;
}

Eigen::VectorXd ConstraintSet::ineq_rhs() const {
  return Eigen::Map<const Eigen::VectorXd>(ineq_h.data(), n_ineq());
}

Eigen::MatrixXd ConstraintSet::eq_matrix(int n) const {
  Eigen::MatrixXd E(n_eq(), n);
  for (int i = 0; i < n_eq(); ++i) E.row(i) = eq_e[i].transpose();
  return E;
}

Eigen::VectorXd ConstraintSet::eq_rhs() const {
  return Eigen::Map<const Eigen::VectorXd>(eq_d.data(), n_eq());
}

double ConstraintSet::violation(const Eigen::VectorXd& x) const {
  double v = 0.0;
  for (int i = 0; i < n_ineq(); ++i) {
    v = std::max(v, ineq_g[i].dot(x) - ineq_h[i]);
  }
  for (int i = 0; i < n_eq(); ++i) {
    v = std::max(v, std::abs(eq_e[i].dot(x) - eq_d[i]));
  }
  return v;
}

double SqrtQuadObjective::eval(const Eigen::VectorXd& x) const {
  const double v1 = std::max(q1.eval(x), 0.0);
  const double v2 = std::max(q2.eval(x), 0.0);
  return std::sqrt(v1) + rho * std::sqrt(v2);
}

Eigen::VectorXd SqrtQuadObjective::gradient(const Eigen::VectorXd& x) const {
  const double s1 = std::sqrt(std::max(q1.eval(x), 1e-300));
  const double s2 = std::sqrt(std::max(q2.eval(x), 1e-300));
  return (q1.P * x + q1.p) / s1 + rho * (q2.P * x + q2.p) / s2;
}

void SqrtQuadObjective::gradient_hessian(const Eigen::VectorXd& x,
                                         Eigen::VectorXd& g,
                                         Eigen::MatrixXd& H) const {
  const double s1 = std::sqrt(std::max(q1.eval(x), 1e-300));
  const double s2 = std::sqrt(std::max(q2.eval(x), 1e-300));
  const Eigen::VectorXd u1 = q1.P * x + q1.p;
  const Eigen::VectorXd u2 = q2.P * x + q2.p;
  g = u1 / s1 + rho * u2 / s2;
  H = q1.P / s1 - (u1 * u1.transpose()) / (s1 * s1 * s1) +
      rho * (q2.P / s2 - (u2 * u2.transpose()) / (s2 * s2 * s2));
}

namespace {

// Newton direction with Levenberg escalation until the factorization is
// positive definite and the step is a descent direction.
bool newton_direction(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                      Eigen::VectorXd& p) {
  const int n = static_cast<int>(H.rows());
  double tau = 0.0;
  const double base = std::max(1e-300, H.trace() / n);
  for (int attempt = 0; attempt < 60; ++attempt) {
    Eigen::MatrixXd Hr = H;
    if (tau > 0.0) Hr.diagonal().array() += tau;
    Eigen::LLT<Eigen::MatrixXd> llt(Hr);
    if (llt.info() == Eigen::Success) {
      p = llt.solve(-g);
      if (p.allFinite() && g.dot(p) < 0.0) return true;
    }
    tau = (tau == 0.0) ? 1e-10 * base : tau * 100.0;
  }
  return false;
}

}  // namespace

BarrierResult barrier_minimize(const SqrtQuadObjective& obj,
                               const Eigen::MatrixXd& G,
                               const Eigen::VectorXd& h,
                               const Eigen::VectorXd& x0,
                               const BarrierOptions& opts) {
  const int n = static_cast<int>(x0.size());
  const int m = static_cast<int>(G.rows());
  const bool capped = std::isfinite(opts.q2_cap);

  auto margins = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return h - G * x;
  };
  auto cap_slack = [&](const Eigen::VectorXd& x) -> double {
    return capped ? opts.q2_cap - obj.q2.eval(x) : 1.0;
  };
  auto strictly_feasible = [&](const Eigen::VectorXd& x) -> bool {
    return (m == 0 || margins(x).minCoeff() > 0.0) && cap_slack(x) > 0.0;
  };

  BarrierResult res;
  res.x = x0;
  if (!strictly_feasible(x0)) {
    throw NumericalFailure("barrier_minimize: start is not strictly feasible");
  }

  auto barrier_value = [&](const Eigen::VectorXd& x, double mu) -> double {
    double val = obj.eval(x);
    if (m > 0) {
      const Eigen::VectorXd mg = margins(x);
      for (int i = 0; i < m; ++i) val -= mu * std::log(mg[i]);
    }
    if (capped) val -= mu * std::log(cap_slack(x));
    return val;
  };

  Eigen::VectorXd x = x0;
  double f = obj.eval(x);
  double mu = 0.1 * (1.0 + std::abs(f)) / std::max(1, m);
  const int total_barrier_terms = m + (capped ? 1 : 0);
  bool last_stage_converged = true;

  Eigen::VectorXd g(n), fg(n), p(n);
  Eigen::MatrixXd H(n, n), fH(n, n);

  for (int stage = 0; stage < opts.max_stages; ++stage) {
    bool centered = false;
    for (int it = 0; it < opts.max_newton_per_stage; ++it) {
      obj.gradient_hessian(x, fg, fH);
      g = fg;
      H = fH;
      const Eigen::VectorXd mg = margins(x);
      for (int i = 0; i < m; ++i) {
        const double inv = 1.0 / mg[i];
        g += mu * inv * G.row(i).transpose();
        H += (mu * inv * inv) * (G.row(i).transpose() * G.row(i));
      }
      if (capped) {
        const double slack = cap_slack(x);
        const Eigen::VectorXd dq2 = obj.q2.grad(x);
        g += (mu / slack) * dq2;
        H += (mu / slack) * 2.0 * obj.q2.P +
             (mu / (slack * slack)) * (dq2 * dq2.transpose());
      }

      if (!newton_direction(H, g, p)) break;
      const double decrement = -g.dot(p);
      if (decrement <= 1e-12 * (1.0 + std::abs(f) + mu * total_barrier_terms)) {
        centered = true;
        break;
      }

      // Largest step keeping every margin strictly positive.
      double alpha = 1.0;
      const Eigen::VectorXd gp = G * p;
      for (int i = 0; i < m; ++i) {
        if (gp[i] > 0.0) alpha = std::min(alpha, 0.99 * mg[i] / gp[i]);
      }
      const double f0 = barrier_value(x, mu);
      const double slope = g.dot(p);
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        const Eigen::VectorXd xc = x + alpha * p;
        if (strictly_feasible(xc)) {
          const double fc = barrier_value(xc, mu);
          if (fc <= f0 + 1e-4 * alpha * slope) {
            x = xc;
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      ++res.newton_iters;
      if (!accepted) break;
    }
    last_stage_converged = centered;
    f = obj.eval(x);
    if (mu * total_barrier_terms <= opts.mu_final_rel * (1.0 + std::abs(f))) {
      break;
    }
    mu *= opts.mu_shrink;
  }

  // Crossover polish: pin the active rows as equalities and run Newton on
  // that face. The barrier decrement stalls against the stiff constraint-
  // normal curvature; the face Newton drives the tangential gradient to
  // machine precision and yields clean least-squares multipliers.
  if (m > 0) {
    const Eigen::VectorXd mg0 = margins(x);
    const double xscale = 1.0 + x.norm();
    std::vector<int> active;
    for (int i = 0; i < m; ++i) {
      const double gn = std::max(G.row(i).norm(), 1e-300);
      if (mg0[i] / gn <= 1e-6 * xscale) active.push_back(i);
    }
    for (int round = 0; round < 2 && !active.empty(); ++round) {
      Eigen::MatrixXd Ga(active.size(), n);
      Eigen::VectorXd ha(active.size());
      for (size_t i = 0; i < active.size(); ++i) {
        Ga.row(i) = G.row(active[i]);
        ha[i] = h[active[i]];
      }
      Eigen::VectorXd xp = x;
      try {
        const AffineParam ap = nullspace_param(Ga, ha);
        if (ap.reduced_dim() == 0) {
          xp = ap.x0;
        } else {
          SqrtQuadObjective robj;
          robj.q1 = restrict_quadratic(obj.q1, ap);
          robj.q2 = restrict_quadratic(obj.q2, ap);
          robj.rho = obj.rho;
          Eigen::VectorXd z = ap.project(x);
          Eigen::VectorXd zg(ap.reduced_dim()), zp(ap.reduced_dim());
          Eigen::MatrixXd zH(ap.reduced_dim(), ap.reduced_dim());
          for (int it = 0; it < 40; ++it) {
            robj.gradient_hessian(z, zg, zH);
            if (zg.lpNorm<Eigen::Infinity>() <= 1e-13 * (1.0 + std::abs(f)))
              break;
            if (!newton_direction(zH, zg, zp)) break;
            double alpha = 1.0;
            const double fz = robj.eval(z);
            bool ok = false;
            for (int ls = 0; ls < 50; ++ls) {
              const Eigen::VectorXd zc = z + alpha * zp;
              const Eigen::VectorXd xc = ap.lift(zc);
              if ((m == 0 || margins(xc).minCoeff() >= -1e-12 * xscale) &&
                  cap_slack(xc) > 0.0 && robj.eval(zc) <= fz) {
                z = zc;
                ok = true;
                break;
              }
              alpha *= 0.5;
            }
            if (!ok) break;
          }
          xp = ap.lift(z);
        }
      } catch (const Error&) {
        break;  // inconsistent face, keep the barrier iterate
      }
      if (margins(xp).minCoeff() >= -1e-9 * xscale && obj.eval(xp) <= f) {
        x = xp;
        f = obj.eval(x);
      } else {
        break;
      }
      // Multiplier signs decide whether the face was over-constrained.
      const Eigen::VectorXd fgrad = obj.gradient(x);
      Eigen::MatrixXd GaT(n, active.size());
      for (size_t i = 0; i < active.size(); ++i) {
        GaT.col(i) = G.row(active[i]).transpose();
      }
      const Eigen::VectorXd nu = GaT.colPivHouseholderQr().solve(-fgrad);
      std::vector<int> keep;
      for (size_t i = 0; i < active.size(); ++i) {
        if (nu[i] >= -1e-8 * (1.0 + nu.cwiseAbs().maxCoeff())) {
          keep.push_back(active[i]);
        }
      }
      if (keep.size() == active.size()) break;
      active = keep;
    }
  }

  res.x = x;
  res.f = f;

  // Final certificate: nonnegative least-squares multipliers on the active
  // rows, scaled stationarity and complementarity residuals.
  res.multipliers = Eigen::VectorXd::Zero(m);
  const Eigen::VectorXd mg = margins(x);
  const Eigen::VectorXd fgrad = obj.gradient(x);
  const double xscale = 1.0 + x.norm();
  std::vector<int> active;
  for (int i = 0; i < m; ++i) {
    const double gn = std::max(G.row(i).norm(), 1e-300);
    if (mg[i] / gn <= 1e-6 * xscale) active.push_back(i);
  }
  Eigen::VectorXd stat = fgrad;
  while (!active.empty()) {
    Eigen::MatrixXd GaT(n, active.size());
    for (size_t i = 0; i < active.size(); ++i) {
      GaT.col(i) = G.row(active[i]).transpose();
    }
    const Eigen::VectorXd nu = GaT.colPivHouseholderQr().solve(-fgrad);
    int worst = -1;
    double worst_val = -1e-8 * (1.0 + nu.cwiseAbs().maxCoeff());
    for (size_t i = 0; i < active.size(); ++i) {
      if (nu[i] < worst_val) {
        worst_val = nu[i];
        worst = static_cast<int>(i);
      }
    }
    if (worst >= 0) {
      active.erase(active.begin() + worst);
      continue;
    }
    for (size_t i = 0; i < active.size(); ++i) {
      res.multipliers[active[i]] = std::max(nu[i], 0.0);
    }
    stat = fgrad + GaT * nu;
    break;
  }
  double comp = 0.0;
  for (int i = 0; i < m; ++i) comp = std::max(comp, res.multipliers[i] * mg[i]);
  if (capped) {
    const double slack = cap_slack(x);
    const double nu_cap = mu / slack;
    if (nu_cap > 1e-10) {
      stat += nu_cap * obj.q2.grad(x);
      comp = std::max(comp, mu);
    }
  }
  res.kkt_stationarity =
      stat.lpNorm<Eigen::Infinity>() / (1.0 + fgrad.lpNorm<Eigen::Infinity>());
  res.kkt_complementarity = comp / (1.0 + std::abs(f));
  res.converged = last_stage_converged;
  return res;
}

InteriorPoint chebyshev_interior(const Eigen::MatrixXd& G,
                                 const Eigen::VectorXd& h,
                                 double box_halfwidth) {
  const int n = static_cast<int>(G.cols());
  const int m = static_cast<int>(G.rows());
  InteriorPoint out;

  // Extended rows over (x, s): g_i'x + ||g_i|| s <= h_i plus the box.
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  double s_init = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const double gn = G.row(i).norm();
    if (gn <= 1e-300) {
      if (h[i] < 0.0) return out;  // 0 <= h < 0: empty
      continue;
    }
    Eigen::VectorXd r(n + 1);
    r.head(n) = G.row(i).transpose();
    r[n] = gn;
    rows.push_back(r);
    rhs.push_back(h[i]);
    s_init = std::min(s_init, h[i] / gn);
  }
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n + 1);
    r[j] = 1.0;
    rows.push_back(r);
    rhs.push_back(box_halfwidth);
    r[j] = -1.0;
    rows.push_back(r);
    rhs.push_back(box_halfwidth);
  }
  const int mr = static_cast<int>(rows.size());
  Eigen::MatrixXd A(mr, n + 1);
  Eigen::VectorXd b(mr);
  for (int i = 0; i < mr; ++i) {
    A.row(i) = rows[i].transpose();
    b[i] = rhs[i];
  }

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n + 1);
  y[n] = (std::isfinite(s_init) ? s_init : 0.0) - 1.0;

  const double scale = 1.0 + std::abs(y[n]) + box_halfwidth;
  double mu = 0.1 * scale;
  Eigen::VectorXd grad(n + 1), step(n + 1);
  Eigen::MatrixXd H(n + 1, n + 1);
  for (int stage = 0; stage < 64 && mu > 1e-10 * scale; ++stage, mu *= 0.2) {
    for (int it = 0; it < 60; ++it) {
      const Eigen::VectorXd mg = b - A * y;
      grad.setZero();
      grad[n] = -1.0;  // maximize s
      H.setZero();
      for (int i = 0; i < mr; ++i) {
        const double inv = 1.0 / mg[i];
        grad += mu * inv * A.row(i).transpose();
        H += (mu * inv * inv) * (A.row(i).transpose() * A.row(i));
      }
      if (!newton_direction(H, grad, step)) break;
      if (-grad.dot(step) <= 1e-12 * scale) break;
      double alpha = 1.0;
      const Eigen::VectorXd ap = A * step;
      for (int i = 0; i < mr; ++i) {
        if (ap[i] > 0.0) alpha = std::min(alpha, 0.99 * mg[i] / ap[i]);
      }
      // Armijo on the barrier-penalized objective.
      auto fval = [&](const Eigen::VectorXd& yy) {
        const Eigen::VectorXd mm = b - A * yy;
        if (mm.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
        double v = -yy[n];
        for (int i = 0; i < mr; ++i) v -= mu * std::log(mm[i]);
        return v;
      };
      const double f0 = fval(y);
      const double slope = grad.dot(step);
      bool ok = false;
      for (int ls = 0; ls < 60; ++ls) {
        Eigen::VectorXd yc = y + alpha * step;
        if (fval(yc) <= f0 + 1e-4 * alpha * slope) {
          y = yc;
          ok = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!ok) break;
    }
  }

  out.x = y.head(n);
  out.margin = y[n];
  out.feasible = y[n] > 1e-9 * scale;
  return out;
}

Eigen::VectorXd dykstra_project(const Eigen::MatrixXd& G,
                                const Eigen::VectorXd& h, Eigen::VectorXd y,
                                int max_sweeps, double tol) {
  const int m = static_cast<int>(G.rows());
  if (m == 0) return y;
  std::vector<Eigen::VectorXd> corr(m, Eigen::VectorXd::Zero(y.size()));
  Eigen::VectorXd gn2(m);
  for (int i = 0; i < m; ++i) gn2[i] = G.row(i).squaredNorm();
  const double scale = 1.0 + h.cwiseAbs().maxCoeff() + y.norm();

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (int i = 0; i < m; ++i) {
      if (gn2[i] <= 1e-300) continue;
      const Eigen::VectorXd u = y + corr[i];
      const double viol = G.row(i).dot(u) - h[i];
      Eigen::VectorXd projected = u;
      if (viol > 0.0) projected -= (viol / gn2[i]) * G.row(i).transpose();
      corr[i] = u - projected;
      moved = std::max(moved, (projected - y).norm());
      y = projected;
    }
    const double worst = ((G * y - h).array().max(0.0)).maxCoeff();
    if (worst <= tol * scale && moved <= tol * scale) break;
  }
  return y;
}

Eigen::VectorXd exact_project(const Eigen::MatrixXd& G,
                              const Eigen::VectorXd& h,
                              const Eigen::VectorXd& y) {
  const int m = static_cast<int>(G.rows());
  const int n = static_cast<int>(G.cols());
  if (m == 0) return y;
  if (m > 16) return dykstra_project(G, h, y);

  const double scale = 1.0 + h.cwiseAbs().maxCoeff() + y.norm();
  const double tol = 1e-11 * scale;
  if (((G * y - h).array() <= tol).all()) return y;

  // The projection's active set has an independent representation of size
  // at most n; the closest feasible candidate over all subsets is exact.
  Eigen::VectorXd best = y;
  double best_dist = std::numeric_limits<double>::infinity();
  bool found = false;
  const uint32_t masks = 1u << m;
  for (uint32_t mask = 1; mask < masks; ++mask) {
    const int k = __builtin_popcount(mask);
    if (k > n) continue;
    Eigen::MatrixXd Ga(k, n);
    Eigen::VectorXd ra(k);
    int r = 0;
    for (int i = 0; i < m; ++i) {
      if ((mask >> i) & 1u) {
        Ga.row(r) = G.row(i);
        ra[r] = G.row(i).dot(y) - h[i];
        ++r;
      }
    }
    const Eigen::MatrixXd gram = Ga * Ga.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success) continue;
    const Eigen::VectorXd lambda = ldlt.solve(ra);
    if ((gram * lambda - ra).norm() > 1e-9 * (1.0 + ra.norm())) continue;
    const Eigen::VectorXd x = y - Ga.transpose() * lambda;
    if (((G * x - h).array() > tol).any()) continue;
    const double dist = (x - y).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = x;
      found = true;
    }
  }
  return found ? best : dykstra_project(G, h, y);
}

QpOracleResult projected_gradient_qp(const Eigen::MatrixXd& Q,
                                     const Eigen::MatrixXd& G,
                                     const Eigen::VectorXd& h,
                                     const Eigen::VectorXd& x0, int max_iters,
                                     double stall_tol) {
  QpOracleResult res;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q);
  const double L = 2.0 * std::max(eig.eigenvalues().maxCoeff(), 1e-300);
  const double step = 1.0 / L;

  Eigen::VectorXd x = exact_project(G, h, x0);
  Eigen::VectorXd ymom = x;
  double theta = 1.0;
  double fx = x.dot(Q * x);
  double best = fx;
  int since_improve = 0;

  for (int k = 0; k < max_iters; ++k) {
    Eigen::VectorXd xn = exact_project(G, h, ymom - step * 2.0 * (Q * ymom));
    double fn = xn.dot(Q * xn);
    if (fn > fx) {  // monotone restart
      ymom = x;
      theta = 1.0;
      xn = exact_project(G, h, x - step * 2.0 * (Q * x));
      fn = xn.dot(Q * xn);
    }
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    ymom = xn + ((theta - 1.0) / theta_next) * (xn - x);
    theta = theta_next;

    const double improve = fx - fn;
    x = xn;
    fx = fn;
    res.iters = k + 1;
    if (fx < best - stall_tol * (1.0 + std::abs(best))) {
      best = fx;
      since_improve = 0;
    } else if (++since_improve > 2000) {
      res.converged = true;
      break;
    }
    (void)improve;
  }
  res.x = x;
  res.value = fx;
  return res;
}

Eigen::VectorXd projected_subgradient(const SqrtQuadObjective& obj,
                                      const Eigen::MatrixXd& G,
                                      const Eigen::VectorXd& h,
                                      const Eigen::VectorXd& x0, int iters) {
  Eigen::VectorXd x = dykstra_project(G, h, x0);
  Eigen::VectorXd best = x;
  double fbest = obj.eval(x);
  const double a0 = 0.5 * (1.0 + x.norm());
  for (int k = 1; k <= iters; ++k) {
    Eigen::VectorXd g = obj.gradient(x);
    const double gn = g.norm();
    if (gn <= 1e-300) break;
    const double alpha = a0 / (std::sqrt(static_cast<double>(k)) * gn);
    x = dykstra_project(G, h, x - alpha * g);
    const double f = obj.eval(x);
    if (f < fbest) {
      fbest = f;
      best = x;
    }
  }
  return best;
}

Eigen::VectorXd halton_point(uint64_t index, int dim) {
  static const int primes[] = {2,   3,   5,   7,   11,  13,  17,  19,  23,
                               29,  31,  37,  41,  43,  47,  53,  59,  61,
                               67,  71,  73,  79,  83,  89,  97,  101, 103,
                               107, 109, 113, 127, 131, 137, 139, 149, 151,
                               157, 163, 167, 173, 179, 181, 191, 193, 197,
                               199, 211, 223, 227, 229, 233, 239, 241, 251,
                               257, 263, 269, 271, 277, 281, 283, 293, 307,
                               311};
  const int n_primes = static_cast<int>(sizeof(primes) / sizeof(primes[0]));
  Eigen::VectorXd u(dim);
  for (int j = 0; j < dim; ++j) {
    const int base = primes[j % n_primes];
    double f = 1.0, r = 0.0;
    uint64_t i = index + static_cast<uint64_t>(j / n_primes);  // wrap shift
    while (i > 0) {
      f /= base;
      r += f * static_cast<double>(i % base);
      i /= base;
    }
    u[j] = r;
  }
  return u;
}

uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace drpo::nlp
