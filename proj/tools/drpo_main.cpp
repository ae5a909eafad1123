#include <CLI11.hpp>

#include "drpo/runner.hpp"

namespace {

struct CliState {
  drpo::RunConfig cfg;
  std::string mode = "wc";
  std::string format = "csv";
  std::string restrictions_json;
  double theta = 0.0;
  bool theta_set = false;
};

void add_common_options(CLI::App* cmd, CliState& st) {
  cmd->add_option("--data", st.cfg.data_path, "CSV price history")
      ->required();
  cmd->add_option("--mode", st.mode, "wc | bc | both");
  cmd->add_option("--alpha0", st.cfg.alpha0,
                  "minimum empirical portfolio return");
  cmd->add_option("--epsilon", st.cfg.epsilon,
                  "short-cost margin (default 1e-6 ||s0||)");
  cmd->add_option("--restrictions", st.restrictions_json,
                  "restriction set as inline JSON or a JSON file path");
  cmd->add_option("--seed", st.cfg.seed, "RNG seed");
  cmd->add_option("--starts", st.cfg.n_starts, "multistart count");
  cmd->add_option("--out", st.cfg.out_path, "output file (default stdout)");
  cmd->add_option("--format", st.format, "csv | json");
  cmd->add_flag("--parallel", st.cfg.parallel,
                "evaluate trajectory points in parallel (no warm starts)");
  cmd->add_option("--ridge", st.cfg.ridge,
                  "explicit ridge added to the covariance");
  cmd->add_option("--inject-cov-asymmetry", st.cfg.inject_cov_asymmetry,
                  "verification test hook")
      ->group("");  // hidden
}

int finalize(CliState& st) {
  st.cfg.mode = drpo::run_mode_from_string(st.mode);
  st.cfg.format = drpo::output_format_from_string(st.format);
  if (!st.restrictions_json.empty()) {
    st.cfg.restrictions =
        drpo::restrictions_from_json_text(st.restrictions_json);
  }
  if (st.theta_set) st.cfg.theta_target = st.theta;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributionally robust profit opportunities"};
  app.require_subcommand(1);

  CliState st_traj, st_crit, st_verify;

  CLI::App* traj = app.add_subcommand(
      "trajectory", "robust values and theta* over a list of radii");
  add_common_options(traj, st_traj);
  traj->add_option("--deltas", st_traj.cfg.deltas,
                   "ambiguity radii (ascending)")
      ->delimiter(',')
      ->required();

  CLI::App* crit = app.add_subcommand(
      "critical", "critical ambiguity radius for a target theta");
  add_common_options(crit, st_crit);
  crit->add_option("--theta", st_crit.theta, "target robustness degree")
      ->required();
  crit->add_option("--tol", st_crit.cfg.bisect_tol, "bisection tolerance");

  CLI::App* verify = app.add_subcommand(
      "verify", "run the oracle property suites against the data");
  add_common_options(verify, st_verify);
  verify->add_option("--deltas", st_verify.cfg.deltas,
                     "optional radii to sanity-check")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (traj->parsed()) {
      finalize(st_traj);
      return drpo::run_trajectory(st_traj.cfg);
    }
    if (crit->parsed()) {
      st_crit.theta_set = true;
      finalize(st_crit);
      return drpo::run_critical_radius(st_crit.cfg);
    }
    st_verify.theta_set = false;
    finalize(st_verify);
    return drpo::run_verify(st_verify.cfg);
  } catch (const drpo::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
