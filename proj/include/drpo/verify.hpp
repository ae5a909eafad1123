#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "drpo/outer_solver.hpp"

namespace drpo {

struct PropertyResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  bool pass = false;
  std::vector<PropertyResult> properties;

  nlohmann::ordered_json to_json() const;
};

struct VerifyOptions {
  uint64_t seed = 0;
  int n_portfolios = 8;       // random portfolios per property
  int sandwich_samples = 1000;
  double inject_cov_asymmetry = 0.0;  // test hook for the symmetry gate
};

// Property suites run against loaded data: covariance symmetry and
// definiteness, achiever tightness, sandwich sampling, the dual-objective
// grid cross-check and the delta = 0 agreement with the projected-gradient
// QP oracle.
VerifyReport run_verify_suites(const ScenarioSet& sc, const Moments& m,
                               const FeasibleRegion& fr,
                               const VerifyOptions& opts = {});

// delta = 0 oracle: minimize w'Sigma w over the region with accelerated
// projected gradient + Dykstra projection (independent of the barrier path).
double qp_oracle_min_variance(const Moments& m, const FeasibleRegion& fr);

}  // namespace drpo
