#include "drpo/restrictions.hpp"

#include <algorithm>
#include <cmath>

namespace drpo {

namespace {

Eigen::VectorXd unit_row(int n, int j, double sign) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  r[j] = sign;
  return r;
}

Eigen::VectorXd group_row(int n, const std::vector<int>& idx, double sign) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  for (int j : idx) r[j] = sign;
  return r;
}

}  // namespace

std::vector<std::string> RestrictionSet::validate(int n) const {
  std::vector<std::string> errs;
  if (short_floors && short_floors->size() != n) {
    errs.push_back("short_floors length does not match asset count");
  }
  if (min_position && !(*min_position >= 0.0)) {
    errs.push_back("min_position must be >= 0");
  }
  if (max_position && !(*max_position > 0.0)) {
    errs.push_back("max_position must be > 0");
  }
  if (min_position && max_position && *min_position > *max_position) {
    errs.push_back("min_position exceeds max_position");
  }
  if (cardinality && (*cardinality < 1 || *cardinality > n)) {
    errs.push_back("cardinality must lie in [1, n]");
  }
  for (size_t k = 0; k < groups.size(); ++k) {
    const auto& g = groups[k];
    if (g.indices.empty()) {
      errs.push_back("group " + std::to_string(k) + " is empty");
    }
    for (int j : g.indices) {
      if (j < 0 || j >= n) {
        errs.push_back("group " + std::to_string(k) +
                       " has an out-of-range index");
        break;
      }
    }
    if (!(g.cap >= 0.0)) {
      errs.push_back("group " + std::to_string(k) + " cap must be >= 0");
    }
  }
  if (!(big_m > 0.0)) errs.push_back("big_M must be > 0");
  if (cardinality_epsilon < 0.0) {
    errs.push_back("cardinality_epsilon must be >= 0");
  }
  return errs;
}

nlp::ConstraintSet convex_constraints(const RestrictionSet& rs, int n) {
  nlp::ConstraintSet cs;
  if (rs.short_floors) {
    for (int j = 0; j < n; ++j) {
      const double ss = (*rs.short_floors)[j];
      if (ss <= -rs.big_m) continue;  // "no restriction" sentinel
      cs.add_ineq(unit_row(n, j, -1.0), -ss);  // w_j >= ss
    }
  }
  if (rs.max_position) {
    const double wmax = *rs.max_position;
    if (wmax < rs.big_m) {
      for (int j = 0; j < n; ++j) {
        if (wmax == 0.0) {
          cs.add_eq(unit_row(n, j, 1.0), 0.0);
        } else {
          cs.add_ineq(unit_row(n, j, 1.0), wmax);
          cs.add_ineq(unit_row(n, j, -1.0), wmax);
        }
      }
    }
  }
  for (const auto& g : rs.groups) {
    if (g.cap >= rs.big_m * n) continue;
    if (g.cap == 0.0) {
      cs.add_eq(group_row(n, g.indices, 1.0), 0.0);
    } else {
      cs.add_ineq(group_row(n, g.indices, 1.0), g.cap);
      cs.add_ineq(group_row(n, g.indices, -1.0), g.cap);
    }
  }
  return cs;
}

std::vector<SubRegion> enumerate_nonconvex(const RestrictionSet& rs, int n,
                                           double cardinality_eps,
                                           int enumeration_cap) {
  std::vector<SubRegion> out;
  const bool want_signs = rs.min_position && *rs.min_position > 0.0;
  const bool want_support = rs.cardinality && *rs.cardinality < n;
  if (!want_signs && !want_support) return out;
  if (n > enumeration_cap) {
    throw CapExceeded("nonconvex restriction enumeration needs n <= " +
                      std::to_string(enumeration_cap) +
                      " (got n = " + std::to_string(n) + ")");
  }

  // Sign patterns for |w_j| >= w_lower.
  std::vector<SubRegion> sign_regions;
  if (want_signs) {
    const double lo = *rs.min_position;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
      SubRegion r;
      r.label = "signs=";
      for (int j = 0; j < n; ++j) {
        const double sgn = (mask >> j) & 1u ? -1.0 : 1.0;
        r.label += sgn > 0 ? '+' : '-';
        r.extra.add_ineq(unit_row(n, j, -sgn), -lo);  // sgn * w_j >= lo
      }
      sign_regions.push_back(std::move(r));
    }
  } else {
    sign_regions.push_back(SubRegion{});
  }

  // Support subsets of size <= m for the cardinality indicator: assets
  // outside the support stay within the indicator threshold.
  std::vector<SubRegion> support_regions;
  if (want_support) {
    const int m = *rs.cardinality;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (__builtin_popcount(mask) > m) continue;
      SubRegion r;
      r.label = "support={";
      bool first = true;
      for (int j = 0; j < n; ++j) {
        if ((mask >> j) & 1u) {
          r.label += (first ? "" : ",") + std::to_string(j);
          first = false;
        } else {
          r.extra.add_ineq(unit_row(n, j, 1.0), cardinality_eps);
          r.extra.add_ineq(unit_row(n, j, -1.0), cardinality_eps);
        }
      }
      r.label += "}";
      support_regions.push_back(std::move(r));
    }
  } else {
    support_regions.push_back(SubRegion{});
  }

  if (sign_regions.size() * support_regions.size() > 200000) {
    throw CapExceeded("nonconvex restriction enumeration too large");
  }
  for (const auto& s : sign_regions) {
    for (const auto& t : support_regions) {
      SubRegion r;
      r.extra = s.extra;
      r.extra.append(t.extra);
      r.label = s.label;
      if (!s.label.empty() && !t.label.empty()) r.label += ";";
      r.label += t.label;
      out.push_back(std::move(r));
    }
  }
  return out;
}

bool satisfies_raw(const RestrictionSet& rs, const Eigen::VectorXd& w,
                   double cardinality_eps, double tol) {
  const int n = static_cast<int>(w.size());
  if (rs.short_floors) {
    for (int j = 0; j < n; ++j) {
      const double ss = (*rs.short_floors)[j];
      if (ss <= -rs.big_m) continue;
      if (w[j] < ss - tol) return false;
    }
  }
  if (rs.min_position && *rs.min_position > 0.0) {
    for (int j = 0; j < n; ++j) {
      if (std::abs(w[j]) < *rs.min_position - tol) return false;
    }
  }
  if (rs.max_position && *rs.max_position < rs.big_m) {
    for (int j = 0; j < n; ++j) {
      if (std::abs(w[j]) > *rs.max_position + tol) return false;
    }
  }
  if (rs.cardinality && *rs.cardinality < n) {
    int count = 0;
    for (int j = 0; j < n; ++j) {
      if (std::abs(w[j]) >= cardinality_eps - tol) ++count;
    }
    if (count > *rs.cardinality) return false;
  }
  for (const auto& g : rs.groups) {
    if (g.cap >= rs.big_m * n) continue;
    double sum = 0.0;
    for (int j : g.indices) sum += w[j];
    if (std::abs(sum) > g.cap + tol) return false;
  }
  return true;
}

}  // namespace drpo
