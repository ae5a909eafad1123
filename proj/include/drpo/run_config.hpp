#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "drpo/restrictions.hpp"

namespace drpo {

enum class RunMode { wc, bc, both };
enum class OutputFormat { csv, json };

RunMode run_mode_from_string(const std::string& s);
OutputFormat output_format_from_string(const std::string& s);

struct RunConfig {
  std::string data_path;
  RunMode mode = RunMode::wc;
  std::vector<double> deltas;          // trajectory radii (sorted)
  std::optional<double> theta_target;  // critical-radius target
  double alpha0 = 0.0;
  double epsilon = 0.0;  // <= 0 selects the 1e-6 ||s0|| default
  RestrictionSet restrictions;
  uint64_t seed = 0;
  int n_starts = 16;
  OutputFormat format = OutputFormat::csv;
  std::string out_path;  // empty = stdout
  bool parallel = false;
  double ridge = 0.0;
  double bisect_tol = 1e-6;
  double inject_cov_asymmetry = 0.0;  // verify test hook

  // Throws DataError/DomainError on invariant violations (exactly one of
  // deltas / theta_target, finite alpha0, positive deltas ordering, ...).
  void validate(bool needs_deltas, bool needs_theta) const;
};

// Restriction set from its JSON object form (see README for the schema).
RestrictionSet restrictions_from_json(const nlohmann::json& j);
RestrictionSet restrictions_from_json_text(const std::string& text);

}  // namespace drpo
