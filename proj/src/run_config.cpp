#include "drpo/run_config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace drpo {

RunMode run_mode_from_string(const std::string& s) {
  if (s == "wc") return RunMode::wc;
  if (s == "bc") return RunMode::bc;
  if (s == "both") return RunMode::both;
  throw DataError("mode must be wc, bc or both (got '" + s + "')");
}

OutputFormat output_format_from_string(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw DataError("format must be csv or json (got '" + s + "')");
}

void RunConfig::validate(bool needs_deltas, bool needs_theta) const {
  if (data_path.empty()) throw DataError("no data file given");
  if (!std::isfinite(alpha0)) throw DataError("alpha0 must be finite");
  for (size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] >= 0.0)) throw DataError("deltas must be >= 0");
    if (i > 0 && deltas[i] < deltas[i - 1]) {
      throw DataError("deltas must be sorted ascending");
    }
  }
  if (theta_target && !(*theta_target > 0.0)) {
    throw DataError("theta must be > 0");
  }
  if (needs_deltas) {
    if (deltas.empty()) throw DataError("no deltas given");
    if (theta_target) {
      throw DataError("exactly one of --deltas / --theta may be set");
    }
  }
  if (needs_theta) {
    if (!theta_target) throw DataError("no theta target given");
    if (!deltas.empty()) {
      throw DataError("exactly one of --deltas / --theta may be set");
    }
  }
  if (n_starts < 1) throw DataError("starts must be >= 1");
  if (ridge < 0.0) throw DataError("ridge must be >= 0");
  if (!(bisect_tol > 0.0)) throw DataError("tolerance must be > 0");
}

RestrictionSet restrictions_from_json(const nlohmann::json& j) {
  RestrictionSet rs;
  if (!j.is_object()) throw DataError("restrictions JSON must be an object");
  if (j.contains("big_m")) rs.big_m = j.at("big_m").get<double>();
  if (j.contains("short_floors")) {
    const auto& arr = j.at("short_floors");
    Eigen::VectorXd v(arr.size());
    for (size_t i = 0; i < arr.size(); ++i) v[i] = arr.at(i).get<double>();
    rs.short_floors = v;
  }
  if (j.contains("min_position")) {
    rs.min_position = j.at("min_position").get<double>();
  }
  if (j.contains("max_position")) {
    rs.max_position = j.at("max_position").get<double>();
  }
  if (j.contains("cardinality")) {
    rs.cardinality = j.at("cardinality").get<int>();
  }
  if (j.contains("cardinality_epsilon")) {
    rs.cardinality_epsilon = j.at("cardinality_epsilon").get<double>();
  }
  if (j.contains("groups")) {
    for (const auto& g : j.at("groups")) {
      AllocationGroup ag;
      for (const auto& idx : g.at("indices")) {
        ag.indices.push_back(idx.get<int>());
      }
      ag.cap = g.at("cap").get<double>();
      rs.groups.push_back(std::move(ag));
    }
  }
  return rs;
}

RestrictionSet restrictions_from_json_text(const std::string& text) {
  // Accepts either a path to a JSON file or inline JSON.
  std::string payload = text;
  if (std::filesystem::exists(text)) {
    std::ifstream in(text);
    std::stringstream ss;
    ss << in.rdbuf();
    payload = ss.str();
  }
  try {
    return restrictions_from_json(nlohmann::json::parse(payload));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("restrictions JSON: ") + e.what());
  }
}

}  // namespace drpo
