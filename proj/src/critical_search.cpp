#include "drpo/critical_search.hpp"

#include <cmath>
#include <future>

#include "drpo/log.hpp"

namespace drpo {

double g_alpha(double alpha, double theta) {
  if (!(theta > 0.0)) throw DomainError("g_alpha needs theta > 0");
  return alpha * alpha / (theta * theta);
}

ThetaStar theta_star(double alpha_star, double value) {
  if (value > 0.0) return ThetaStar::finite(alpha_star / std::sqrt(value));
  if (alpha_star > 0.0) return ThetaStar::infinite();
  return ThetaStar::undefined();
}

namespace {

// Shared monotone bisection. `crossed` tests whether delta is at or past
// the target side; it must be monotone in delta.
CriticalRadius bisect(const std::function<bool(double)>& crossed,
                      double theta_target, const BisectOptions& opts) {
  CriticalRadius out;
  out.theta_target = theta_target;
  if (crossed(0.0)) {
    out.delta_critical = 0.0;
    out.bracket_lo = 0.0;
    out.bracket_hi = 0.0;
    out.iterations = 0;
    return out;
  }
  double lo = 0.0;
  double hi = opts.hi0;
  while (!crossed(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > opts.hi_cap) {
      throw BracketFailure("doubling reached " + std::to_string(hi) +
                           " without crossing the target level");
    }
  }
  int iters = 0;
  while (hi - lo > opts.tol) {
    const double mid = 0.5 * (lo + hi);
    if (crossed(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++iters;
    if (iters > 200) break;
  }
  out.delta_critical = hi;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.iterations = iters;
  return out;
}

}  // namespace

CriticalRadius critical_radius_wc(const ValueFn& v, double g,
                                  double theta_target,
                                  const BisectOptions& opts) {
  return bisect([&](double d) { return v(d) >= g; }, theta_target, opts);
}

CriticalRadius critical_radius_bc(const ValueFn& v, double g,
                                  double theta_target,
                                  const BisectOptions& opts) {
  return bisect([&](double d) { return v(d) <= g; }, theta_target, opts);
}

namespace {

struct WarmValueFn {
  std::function<SolverResult(double, const Eigen::VectorXd&)> solve;
  Eigen::VectorXd warm;

  double operator()(double delta) {
    SolverResult r = solve(delta, warm);
    if (r.status == SolveStatus::optimal) warm = r.w_star.w;
    return r.value;
  }
};

double alpha_at_base(const ScenarioSet& sc, const Moments& m,
                     const FeasibleRegion& fr, const SolverOptions& sopts,
                     double theta) {
  if (!(theta > 0.0)) throw DomainError("critical radius needs theta > 0");
  SolverResult base = solve_wc(sc, m, AmbiguityRadius(0.0), fr, sopts);
  if (base.status == SolveStatus::infeasible) {
    throw InfeasibleRegion("critical radius: admissible region is empty");
  }
  return fr.scen_mean.dot(base.w_star.w);
}

}  // namespace

CriticalRadius critical_radius_wc(double theta, const ScenarioSet& sc,
                                  const Moments& m, const FeasibleRegion& fr,
                                  const SolverOptions& sopts,
                                  const BisectOptions& bopts) {
  const double alpha = alpha_at_base(sc, m, fr, sopts, theta);
  const double g = g_alpha(alpha, theta);
  WarmValueFn fn{[&](double d, const Eigen::VectorXd& warm) {
                   SolverOptions o = sopts;
                   o.warm_start = warm;
                   return solve_wc(sc, m, AmbiguityRadius(d), fr, o);
                 },
                 sopts.warm_start};
  return critical_radius_wc([&fn](double d) { return fn(d); }, g, theta,
                            bopts);
}

CriticalRadius critical_radius_bc(double theta, const ScenarioSet& sc,
                                  const Moments& m, const FeasibleRegion& fr,
                                  const SolverOptions& sopts,
                                  const BisectOptions& bopts) {
  const double alpha = alpha_at_base(sc, m, fr, sopts, theta);
  const double g = g_alpha(alpha, theta);
  WarmValueFn fn{[&](double d, const Eigen::VectorXd& warm) {
                   SolverOptions o = sopts;
                   o.warm_start = warm;
                   return solve_bc_multistart(sc, m, AmbiguityRadius(d), fr,
                                              o);
                 },
                 sopts.warm_start};
  return critical_radius_bc([&fn](double d) { return fn(d); }, g, theta,
                            bopts);
}

namespace {

RobustnessResult row_from_solve(double delta, const SolverResult& r,
                                const FeasibleRegion& fr) {
  RobustnessResult row;
  row.delta = AmbiguityRadius(delta);
  row.status = r.status;
  row.restarts_used = r.restarts_used;
  if (r.status == SolveStatus::optimal) {
    row.value = r.value;
    row.w_star = r.w_star;
    row.alpha_star = fr.scen_mean.dot(r.w_star.w);
    row.theta = theta_star(row.alpha_star, row.value);
    row.arbitrage = row.theta.is_infinite();
  }
  return row;
}

}  // namespace

std::vector<RobustnessResult> trajectory(const std::vector<double>& deltas,
                                         TrajectoryMode mode,
                                         const ScenarioSet& sc,
                                         const Moments& m,
                                         const FeasibleRegion& fr,
                                         const SolverOptions& opts,
                                         bool parallel) {
  for (size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] >= 0.0)) throw DomainError("trajectory deltas must be >= 0");
    if (i > 0 && deltas[i] < deltas[i - 1]) {
      throw DomainError("trajectory deltas must be sorted ascending");
    }
  }

  auto solve_point = [&](double d, const Eigen::VectorXd& warm) {
    SolverOptions o = opts;
    o.warm_start = warm;
    return mode == TrajectoryMode::wc
               ? solve_wc(sc, m, AmbiguityRadius(d), fr, o)
               : solve_bc_multistart(sc, m, AmbiguityRadius(d), fr, o);
  };

  std::vector<RobustnessResult> rows;
  rows.reserve(deltas.size());

  if (parallel) {
    std::vector<std::future<RobustnessResult>> futures;
    futures.reserve(deltas.size());
    for (double d : deltas) {
      futures.push_back(std::async(std::launch::async, [&, d] {
        try {
          return row_from_solve(d, solve_point(d, Eigen::VectorXd()), fr);
        } catch (const Error& e) {
          log::info("trajectory point delta=%g failed: %s", d, e.what());
          RobustnessResult row;
          row.delta = AmbiguityRadius(d);
          row.status = SolveStatus::max_iter;
          return row;
        }
      }));
    }
    for (auto& f : futures) rows.push_back(f.get());
    return rows;
  }

  Eigen::VectorXd warm;
  for (double d : deltas) {
    try {
      RobustnessResult row = row_from_solve(d, solve_point(d, warm), fr);
      if (row.status == SolveStatus::optimal) warm = row.w_star.w;
      rows.push_back(std::move(row));
    } catch (const Error& e) {
      log::info("trajectory point delta=%g failed: %s", d, e.what());
      RobustnessResult row;
      row.delta = AmbiguityRadius(d);
      row.status = SolveStatus::max_iter;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace drpo
