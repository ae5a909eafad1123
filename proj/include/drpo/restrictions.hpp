#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "drpo/nlp.hpp"

namespace drpo {

struct AllocationGroup {
  std::vector<int> indices;  // 0-based asset indices
  double cap = 0.0;          // |sum of group weights| <= cap
};

// Portfolio restrictions. Absent optionals mean "no restriction"; values at
// their big-M sentinel (short floor -M, max position M, group cap M*n,
// cardinality m = n) produce no constraint rows at all, so a fully
// unrestricted set leaves the solve untouched bit for bit.
struct RestrictionSet {
  std::optional<Eigen::VectorXd> short_floors;  // w_j >= ss_j
  std::optional<double> min_position;           // |w_j| >= w_lower
  std::optional<double> max_position;           // |w_j| <= w_upper
  std::optional<int> cardinality;               // #{ |w_j| >= eps } <= m
  std::vector<AllocationGroup> groups;
  double big_m = 1e6;
  double cardinality_epsilon = 0.0;  // 0 = inherit the region margin

  bool empty() const {
    return !short_floors && !min_position && !max_position && !cardinality &&
           groups.empty();
  }

  // All invariant violations, empty when valid.
  std::vector<std::string> validate(int n) const;
};

// Linear rows for the convex restrictions (short floors, max positions,
// allocation caps). Zero-width intervals become equality rows; rows at the
// big-M sentinel are dropped.
nlp::ConstraintSet convex_constraints(const RestrictionSet& rs, int n);

struct SubRegion {
  nlp::ConstraintSet extra;
  std::string label;
};

// Expands min-position sign patterns and cardinality support subsets into
// convex subregions; the outer solve is the best value over all of them.
// Throws CapExceeded when n (or the region count) is beyond the cap.
std::vector<SubRegion> enumerate_nonconvex(const RestrictionSet& rs, int n,
                                           double cardinality_eps,
                                           int enumeration_cap = 12);

// True when w satisfies the raw (possibly nonconvex) restriction predicates;
// used by oracles and the active-set path validity checks.
bool satisfies_raw(const RestrictionSet& rs, const Eigen::VectorXd& w,
                   double cardinality_eps, double tol = 1e-9);

}  // namespace drpo
