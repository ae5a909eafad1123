#include "drpo/verify.hpp"

#include <cmath>
#include <random>

#include "drpo/log.hpp"
#include "drpo/report.hpp"

namespace drpo {

nlohmann::ordered_json VerifyReport::to_json() const {
  nlohmann::ordered_json o;
  o["pass"] = pass;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& p : properties) {
    nlohmann::ordered_json e;
    e["name"] = p.name;
    e["pass"] = p.pass;
    e["detail"] = p.detail;
    arr.push_back(std::move(e));
  }
  o["properties"] = std::move(arr);
  return o;
}

namespace {

Eigen::VectorXd random_portfolio(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd w(n);
  for (int j = 0; j < n; ++j) w[j] = gauss(rng);
  if (w.norm() < 1e-8) w[0] = 1.0;
  return w / w.norm();
}

std::string err_detail(const char* what, double err, double tol) {
  return std::string(what) + ": worst " + format_double(err) + " (tol " +
         format_double(tol) + ")";
}

PropertyResult check_moments(const Moments& m, double inject) {
  PropertyResult p;
  p.name = "moments-symmetry-definite";
  Eigen::MatrixXd cov = m.cov;
  if (inject != 0.0 && cov.rows() >= 2) {
    cov(0, 1) += inject;  // symmetry-breaking test hook
  }
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  const bool sym_ok = asym <= 1e-12 * scale;
  const bool pd_ok = m.min_eig > 0.0;
  const bool finite_ok = m.mean.allFinite() && cov.allFinite();
  p.pass = sym_ok && pd_ok && finite_ok;
  p.detail = err_detail("max |cov - cov'|", asym, 1e-12 * scale);
  if (!pd_ok) p.detail += "; min eigenvalue not positive";
  return p;
}

PropertyResult check_achievers(const ScenarioSet& sc,
                               const VerifyOptions& opts) {
  PropertyResult p;
  p.name = "achiever-tightness";
  std::mt19937_64 rng(nlp::derive_seed(opts.seed, 1));
  double worst = 0.0;
  for (int k = 0; k < opts.n_portfolios; ++k) {
    const Portfolio w(random_portfolio(rng, sc.n()));
    const double var = portfolio_scenario_variance(w, sc.scenarios);
    if (!(var > 0.0)) continue;
    const double onset = var / (w.norm2 * w.norm2);
    for (double frac : {0.25, 1.0, 4.0}) {
      const AmbiguityRadius d(frac * onset);
      const double sigma = std::sqrt(var);
      const double wc = std::pow(sigma + std::sqrt(d.delta) * w.norm2, 2);
      const double bc =
          std::pow(std::max(sigma - std::sqrt(d.delta) * w.norm2, 0.0), 2);

      const auto pw = worst_case_achiever(w, sc, d);
      const auto pb = best_case_achiever(w, sc, d);
      const double vw = portfolio_scenario_variance(w, pw.scenarios);
      const double vb = portfolio_scenario_variance(w, pb.scenarios);
      worst = std::max(worst, std::abs(vw - wc) / std::max(1.0, wc));
      worst = std::max(worst, std::abs(vb - bc) / std::max(1.0, std::abs(bc)));
      worst = std::max(worst,
                       std::abs(pw.cost - d.delta) / std::max(1.0, d.delta));
      if (pb.cost > d.delta * (1.0 + 1e-9) + 1e-12) worst = std::max(worst, 1.0);
    }
  }
  p.pass = worst <= 1e-9;
  p.detail = err_detail("relative tightness error", worst, 1e-9);
  return p;
}

PropertyResult check_sandwich(const ScenarioSet& sc,
                              const VerifyOptions& opts) {
  PropertyResult p;
  p.name = "sandwich";
  std::mt19937_64 rng(nlp::derive_seed(opts.seed, 2));
  double worst = 0.0;
  const int n_w = std::max(1, opts.n_portfolios / 2);
  for (int k = 0; k < n_w; ++k) {
    const Portfolio w(random_portfolio(rng, sc.n()));
    const double var = portfolio_scenario_variance(w, sc.scenarios);
    if (!(var > 0.0)) continue;
    const double onset = var / (w.norm2 * w.norm2);
    const AmbiguityRadius d(0.8 * onset);
    const double sigma = std::sqrt(var);
    const double wc = std::pow(sigma + std::sqrt(d.delta) * w.norm2, 2);
    const double bc =
        std::pow(std::max(sigma - std::sqrt(d.delta) * w.norm2, 0.0), 2);
    const int per_w = opts.sandwich_samples / n_w + 1;
    for (int s = 0; s < per_w; ++s) {
      const auto pert = random_feasible_perturbation(
          sc, d, nlp::derive_seed(opts.seed, 1000 + k * per_w + s));
      const double v = portfolio_scenario_variance(w, pert.scenarios);
      worst = std::max(worst, (bc - v) / std::max(1.0, bc));
      worst = std::max(worst, (v - wc) / std::max(1.0, wc));
    }
  }
  p.pass = worst <= 1e-9;
  p.detail = err_detail("max bound overshoot", worst, 1e-9);
  return p;
}

PropertyResult check_dual_grid(const ScenarioSet& sc,
                               const VerifyOptions& opts) {
  PropertyResult p;
  p.name = "dual-grid-cross-check";
  std::mt19937_64 rng(nlp::derive_seed(opts.seed, 3));
  Moments m = detail::raw_moments(sc);
  double worst = 0.0;
  for (int k = 0; k < opts.n_portfolios; ++k) {
    const Portfolio w(random_portfolio(rng, sc.n()));
    const double base = base_variance(w, m);
    for (double delta : {0.01, 0.1, 1.0}) {
      const AmbiguityRadius d(delta);
      const double alpha = (sc.scenarios * w.w).mean();
      const DualGridResult g = dual_grid_minimum(w, d, sc);
      const double via_dual = -g.min_h - alpha * alpha;
      const double closed = best_case_variance(w, m, d);
      const double denom =
          std::max({std::abs(closed), 1e-12 + 1e-6 * (base + alpha * alpha)});
      worst = std::max(worst, std::abs(via_dual - closed) / denom);
    }
  }
  p.pass = worst <= 1e-3;
  p.detail = err_detail("relative dual gap", worst, 1e-3);
  return p;
}

PropertyResult check_qp_zero_delta(const ScenarioSet& sc, const Moments& m,
                                   const FeasibleRegion& fr) {
  PropertyResult p;
  p.name = "qp-zero-delta-agreement";
  const SolverResult wc = solve_wc(sc, m, AmbiguityRadius(0.0), fr);
  const SolverResult bc =
      solve_bc_multistart(sc, m, AmbiguityRadius(0.0), fr);
  if (wc.status == SolveStatus::infeasible) {
    p.pass = false;
    p.detail = "region infeasible";
    return p;
  }
  const double oracle = qp_oracle_min_variance(m, fr);
  const double scale = std::max(1.0, std::abs(oracle));
  const double err = std::max(std::abs(wc.value - oracle),
                              std::abs(bc.value - oracle)) /
                     scale;
  p.pass = err <= 1e-6;
  p.detail = err_detail("relative value gap vs QP oracle", err, 1e-6);
  return p;
}

}  // namespace

double qp_oracle_min_variance(const Moments& m, const FeasibleRegion& fr) {
  const int n = static_cast<int>(fr.s0.size());
  nlp::ConstraintSet rows = region_constraints(fr);
  std::vector<SubRegion> subs = enumerate_nonconvex(
      fr.restrictions, n, fr.cardinality_eps());
  if (subs.empty()) subs.push_back(SubRegion{});

  double best = std::numeric_limits<double>::infinity();
  for (const auto& sub : subs) {
    nlp::ConstraintSet all = rows;
    all.append(sub.extra);
    nlp::AffineParam ap =
        all.n_eq() > 0
            ? nlp::nullspace_param(all.eq_matrix(n), all.eq_rhs())
            : nlp::AffineParam::identity(n);
    if (ap.reduced_dim() == 0) {
      if (all.violation(ap.x0) <= 1e-9 * (1.0 + ap.x0.norm())) {
        best = std::min(best, ap.x0.dot(m.cov * ap.x0));
      }
      continue;
    }
    std::vector<Eigen::VectorXd> gz;
    std::vector<double> hz;
    bool empty = false;
    for (int i = 0; i < all.n_ineq(); ++i) {
      Eigen::VectorXd g = ap.B.transpose() * all.ineq_g[i];
      const double rhs = all.ineq_h[i] - all.ineq_g[i].dot(ap.x0);
      if (g.norm() <= 1e-13 * std::max(1.0, all.ineq_g[i].norm())) {
        if (rhs < -1e-11 * (1.0 + std::abs(all.ineq_h[i]))) empty = true;
        continue;
      }
      gz.push_back(std::move(g));
      hz.push_back(rhs);
    }
    if (empty) continue;
    Eigen::MatrixXd G(gz.size(), ap.reduced_dim());
    Eigen::VectorXd h(gz.size());
    double floor = 0.0;
    for (size_t i = 0; i < gz.size(); ++i) {
      G.row(i) = gz[i].transpose();
      h[i] = hz[i];
      if (h[i] < 0.0) floor = std::max(floor, -h[i] / gz[i].norm());
    }
    nlp::InteriorPoint ip;
    double box = 100.0 * (1.0 + floor);
    for (int attempt = 0; attempt < 4 && !ip.feasible; ++attempt, box *= 100.0) {
      ip = nlp::chebyshev_interior(G, h, box);
    }
    if (!ip.feasible) continue;
    const Eigen::MatrixXd Qz =
        ap.B.transpose() * m.cov * ap.B;
    const auto r = nlp::projected_gradient_qp(Qz, G, h, ip.x);
    best = std::min(best, r.value);
  }
  if (!std::isfinite(best)) {
    throw InfeasibleRegion("QP oracle: no feasible subregion");
  }
  return best;
}

VerifyReport run_verify_suites(const ScenarioSet& sc, const Moments& m,
                               const FeasibleRegion& fr,
                               const VerifyOptions& opts) {
  VerifyReport report;
  report.properties.push_back(check_moments(m, opts.inject_cov_asymmetry));
  report.properties.push_back(check_achievers(sc, opts));
  report.properties.push_back(check_sandwich(sc, opts));
  report.properties.push_back(check_dual_grid(sc, opts));
  report.properties.push_back(check_qp_zero_delta(sc, m, fr));
  report.pass = true;
  for (const auto& p : report.properties) {
    report.pass = report.pass && p.pass;
    log::info("verify %s: %s (%s)", p.name.c_str(),
              p.pass ? "pass" : "FAIL", p.detail.c_str());
  }
  return report;
}

}  // namespace drpo
