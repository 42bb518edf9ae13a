#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ctpe/search_space.hpp"

namespace ctpe {

enum class ConstraintKind { measurable, hard };

// Constraints are in "value <= threshold" form. Hard constraints only report
// pass/fail through Observation::hard_ok and carry no threshold.
struct ConstraintSpec {
  double threshold = 0.0;
  bool cheap = false;
  ConstraintKind kind = ConstraintKind::measurable;

  static ConstraintSpec measurable(double threshold, bool cheap = false) {
    return {threshold, cheap, ConstraintKind::measurable};
  }
  static ConstraintSpec hard() { return {0.0, false, ConstraintKind::hard}; }

  friend bool operator==(const ConstraintSpec&, const ConstraintSpec&) = default;
};

// One evaluation record. `constraints` and `hard_ok` are indexed by
// constraint; entries that were not measured are empty. Three shapes occur:
//   full:         objective and every measurable constraint present
//   partial:      no objective, only the cheap constraints present
//   hard failure: no objective, some hard_ok entry false
struct Observation {
  Config config;
  std::optional<double> objective;
  std::vector<std::optional<double>> constraints;
  std::vector<std::optional<bool>> hard_ok;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Indices refer to positions in the list passed to the split function.
struct SplitResult {
  std::vector<std::size_t> good;
  std::vector<std::size_t> bad;
  double gamma_hat = 1.0;

  std::size_t eligible_count() const { return good.size() + bad.size(); }
};

// Every measurable constraint present and within its threshold, every hard
// constraint passed.
bool is_feasible(const Observation& obs, std::span<const ConstraintSpec> specs);

// ceil(sqrt(n) / 4), the good-set size of the original TPE split.
std::size_t top_count(std::size_t n);

// Objective split that keeps every observation up to and including the
// top_count(N)-th feasible one in objective order. Falls back to "all good"
// when fewer feasible observations exist. Observations without an objective
// are not eligible.
SplitResult split_objective_feasible(std::span<const Observation> observations,
                                     std::span<const ConstraintSpec> specs);

// Best top_count(N) observations by objective, feasibility ignored.
SplitResult split_objective_vanilla(std::span<const Observation> observations);

// Split on constraint `index`: good = values <= the largest value within the
// threshold, or <= the smallest value when nothing satisfies the threshold.
SplitResult split_constraint(std::span<const Observation> observations, std::size_t index,
                             double threshold);

// Plain threshold split used by the naive extension. Good may be empty.
SplitResult split_constraint_naive(std::span<const Observation> observations, std::size_t index,
                                   double threshold);

// good = observations that passed hard constraint `index`. Good may be empty.
SplitResult split_constraint_hard(std::span<const Observation> observations, std::size_t index);

}  // namespace ctpe
