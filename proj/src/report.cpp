#include "drpo/report.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace drpo {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("bad numeric field '" + s + "'");
  }
  return v;
}

std::string theta_token(const ThetaStar& t) {
  switch (t.kind) {
    case ThetaStar::Kind::finite: return format_double(t.value);
    case ThetaStar::Kind::infinite: return "INF";
    case ThetaStar::Kind::undefined: return "UNDEF";
  }
  return "UNDEF";
}

ThetaStar theta_from_token(const std::string& s) {
  if (s == "INF") return ThetaStar::infinite();
  if (s == "UNDEF") return ThetaStar::undefined();
  return ThetaStar::finite(parse_double(s));
}

}  // namespace

std::vector<TrajectoryRow> rows_from_results(
    const std::vector<RobustnessResult>& results) {
  std::vector<TrajectoryRow> rows;
  rows.reserve(results.size());
  for (const auto& r : results) {
    TrajectoryRow row;
    row.delta = r.delta.delta;
    row.value = r.value;
    row.alpha_star = r.alpha_star;
    row.theta = r.theta;
    row.arbitrage = r.arbitrage;
    row.status = r.status;
    row.restarts_used = r.restarts_used;
    rows.push_back(row);
  }
  return rows;
}

std::string trajectory_to_csv(const std::vector<TrajectoryRow>& rows) {
  std::string out = "delta,value,alpha_star,theta_star,status,restarts_used\n";
  for (const auto& r : rows) {
    out += format_double(r.delta) + "," + format_double(r.value) + "," +
           format_double(r.alpha_star) + "," + theta_token(r.theta) + "," +
           to_string(r.status) + "," + std::to_string(r.restarts_used) + "\n";
  }
  return out;
}

std::string trajectory_to_json(const std::vector<TrajectoryRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["delta"] = r.delta;
    o["value"] = r.value;
    o["alpha_star"] = r.alpha_star;
    if (r.theta.is_finite()) {
      o["theta_star"] = r.theta.value;
    } else {
      o["theta_star"] = nullptr;
    }
    o["arbitrage"] = r.arbitrage;
    o["status"] = to_string(r.status);
    o["restarts_used"] = r.restarts_used;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::vector<TrajectoryRow> trajectory_from_csv(const std::string& text) {
  std::vector<TrajectoryRow> rows;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trajectory CSV");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw ParseError("trajectory CSV row needs 6 cells");
    TrajectoryRow r;
    r.delta = parse_double(cells[0]);
    r.value = parse_double(cells[1]);
    r.alpha_star = parse_double(cells[2]);
    r.theta = theta_from_token(cells[3]);
    r.status = solve_status_from_string(cells[4]);
    r.restarts_used = static_cast<int>(parse_double(cells[5]));
    r.arbitrage = r.theta.is_infinite();
    rows.push_back(r);
  }
  return rows;
}

std::vector<TrajectoryRow> trajectory_from_json(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("trajectory JSON: ") + e.what());
  }
  std::vector<TrajectoryRow> rows;
  for (const auto& o : arr) {
    TrajectoryRow r;
    r.delta = o.at("delta").get<double>();
    r.value = o.at("value").get<double>();
    r.alpha_star = o.at("alpha_star").get<double>();
    r.arbitrage = o.at("arbitrage").get<bool>();
    if (o.at("theta_star").is_null()) {
      r.theta = r.arbitrage ? ThetaStar::infinite() : ThetaStar::undefined();
    } else {
      r.theta = ThetaStar::finite(o.at("theta_star").get<double>());
    }
    r.status = solve_status_from_string(o.at("status").get<std::string>());
    r.restarts_used = o.at("restarts_used").get<int>();
    rows.push_back(r);
  }
  return rows;
}

std::string critical_to_csv(const CriticalRadius& cr) {
  std::string out =
      "theta_target,delta_critical,bracket_lo,bracket_hi,iterations\n";
  out += format_double(cr.theta_target) + "," +
         format_double(cr.delta_critical) + "," +
         format_double(cr.bracket_lo) + "," + format_double(cr.bracket_hi) +
         "," + std::to_string(cr.iterations) + "\n";
  return out;
}

std::string critical_to_json(const CriticalRadius& cr) {
  nlohmann::ordered_json o;
  o["theta_target"] = cr.theta_target;
  o["delta_critical"] = cr.delta_critical;
  o["bracket_lo"] = cr.bracket_lo;
  o["bracket_hi"] = cr.bracket_hi;
  o["iterations"] = cr.iterations;
  return o.dump(2) + "\n";
}

}  // namespace drpo
