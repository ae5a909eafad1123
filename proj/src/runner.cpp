#include "drpo/runner.hpp"

#include <cstdio>
#include <fstream>

#include "drpo/log.hpp"
#include "drpo/report.hpp"
#include "drpo/verify.hpp"

namespace drpo {

namespace {

struct LoadedProblem {
  ScenarioSet sc;
  Moments m;
  FeasibleRegion fr;
};

LoadedProblem load_problem(const RunConfig& cfg) {
  LoadedProblem lp;
  const PriceSeries ps = load_prices(cfg.data_path);
  lp.sc = build_scenario_set(ps, ScenarioMode::levels);
  lp.m = empirical_moments(lp.sc, 1e-10, cfg.ridge);
  const double eps =
      cfg.epsilon > 0.0 ? cfg.epsilon : default_epsilon(lp.sc.s0);
  lp.fr = make_feasible_region(lp.sc, lp.m, cfg.alpha0, eps,
                               cfg.restrictions);
  return lp;
}

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions o;
  o.n_starts = cfg.n_starts;
  o.seed = cfg.seed;
  return o;
}

// Returns false when the sink could not be opened.
bool emit(const RunConfig& cfg, const std::string& payload) {
  if (cfg.out_path.empty()) {
    std::fwrite(payload.data(), 1, payload.size(), stdout);
    return true;
  }
  std::ofstream out(cfg.out_path, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "error: cannot write '%s'\n", cfg.out_path.c_str());
    return false;
  }
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  return static_cast<bool>(out);
}

int config_error(const Error& e) {
  std::fprintf(stderr, "error: %s\n", e.what());
  return 1;
}

}  // namespace

int run_trajectory(const RunConfig& cfg) {
  std::vector<TrajectoryRow> rows;
  try {
    cfg.validate(/*needs_deltas=*/true, /*needs_theta=*/false);
    const LoadedProblem lp = load_problem(cfg);
    const SolverOptions opts = solver_options(cfg);

    std::vector<TrajectoryMode> modes;
    if (cfg.mode == RunMode::wc || cfg.mode == RunMode::both) {
      modes.push_back(TrajectoryMode::wc);
    }
    if (cfg.mode == RunMode::bc || cfg.mode == RunMode::both) {
      modes.push_back(TrajectoryMode::bc);
    }
    for (TrajectoryMode mode : modes) {
      const auto results = trajectory(cfg.deltas, mode, lp.sc, lp.m, lp.fr,
                                      opts, cfg.parallel);
      const auto block = rows_from_results(results);
      rows.insert(rows.end(), block.begin(), block.end());
    }
  } catch (const Error& e) {
    return config_error(e);
  }

  const std::string payload = cfg.format == OutputFormat::csv
                                  ? trajectory_to_csv(rows)
                                  : trajectory_to_json(rows);
  if (!emit(cfg, payload)) return 1;
  for (const auto& r : rows) {
    if (r.status != SolveStatus::optimal) return 2;
  }
  return 0;
}

int run_critical_radius(const RunConfig& cfg) {
  CriticalRadius cr;
  try {
    cfg.validate(/*needs_deltas=*/false, /*needs_theta=*/true);
    if (cfg.mode == RunMode::both) {
      throw DataError("critical radius needs mode wc or bc");
    }
    const LoadedProblem lp = load_problem(cfg);
    const SolverOptions opts = solver_options(cfg);
    BisectOptions bopts;
    bopts.tol = cfg.bisect_tol;
    cr = cfg.mode == RunMode::wc
             ? critical_radius_wc(*cfg.theta_target, lp.sc, lp.m, lp.fr,
                                  opts, bopts)
             : critical_radius_bc(*cfg.theta_target, lp.sc, lp.m, lp.fr,
                                  opts, bopts);
  } catch (const BracketFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const Error& e) {
    return config_error(e);
  }

  const std::string payload = cfg.format == OutputFormat::csv
                                  ? critical_to_csv(cr)
                                  : critical_to_json(cr);
  return emit(cfg, payload) ? 0 : 1;
}

int run_verify(const RunConfig& cfg) {
  VerifyReport report;
  try {
    cfg.validate(/*needs_deltas=*/false, /*needs_theta=*/false);
    const LoadedProblem lp = load_problem(cfg);
    VerifyOptions vopts;
    vopts.seed = cfg.seed;
    vopts.inject_cov_asymmetry = cfg.inject_cov_asymmetry;
    report = run_verify_suites(lp.sc, lp.m, lp.fr, vopts);
  } catch (const Error& e) {
    return config_error(e);
  }

  std::string payload;
  if (cfg.format == OutputFormat::csv) {
    payload = "property,pass,detail\n";
    for (const auto& p : report.properties) {
      std::string detail = p.detail;
      for (auto& ch : detail) {
        if (ch == ',') ch = ';';
      }
      payload += p.name + "," + (p.pass ? "true" : "false") + "," + detail +
                 "\n";
    }
  } else {
    payload = report.to_json().dump(2) + "\n";
  }
  if (!emit(cfg, payload)) return 1;
  if (!report.pass) {
    for (const auto& p : report.properties) {
      if (!p.pass) {
        std::fprintf(stderr, "verify failed: %s (%s)\n", p.name.c_str(),
                     p.detail.c_str());
      }
    }
    return 4;
  }
  return 0;
}

}  // namespace drpo
