#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctpe/search_space.hpp"

namespace ctpe {

using ScalarFunction = std::function<double(const Config&)>;

struct ToyProblem {
  std::string name;
  SearchSpace space;
  ScalarFunction objective;
  std::vector<ScalarFunction> constraints;
  // Best feasible objective for the given thresholds; empty when no closed
  // form is known or the feasible set is empty.
  std::function<std::optional<double>(std::span<const double>)> oracle;
  std::vector<double> default_thresholds;
};

struct ToyValue {
  double objective;
  double constraint;
};

// f = (x+2)^2 + (y+2)^2, c = (x-1)^2 + (y-1)^2.
ToyValue quad_shift(double x, double y);
// f = x^2 + y^2, c = (x-z)^2 + (y-z)^2.
ToyValue quad_overlap(double x, double y, double z);
// f = sin x1 + x2, c = sin x1 * sin x2.
ToyValue sin_modal(double x1, double x2);

double quad_shift_oracle(double threshold);
double quad_overlap_oracle(double z, double threshold);
std::optional<double> sin_modal_oracle(double threshold);

// Registered names: quad_shift, quad_overlap (z = 2.3), quad_overlap_large
// (z = 0.5), sin_modal. Throws std::invalid_argument for unknown names.
ToyProblem make_problem(std::string_view name);
std::vector<std::string> problem_names();

// Empirical gamma_true-quantile of constraint `index` over n_samples uniform
// draws: the floor(gamma_true * n)-th smallest value (1-based).
double threshold_for_quantile(const ToyProblem& problem, std::size_t index, double gamma_true,
                              std::size_t n_samples, std::uint64_t seed = 0);

// Brute-force best feasible objective: a points_per_dim^D grid, then
// `refinements` zoomed grids around the incumbent. Empty if no grid point is
// feasible.
std::optional<double> grid_search_oracle(const ToyProblem& problem,
                                         std::span<const double> thresholds,
                                         std::size_t points_per_dim = 1000,
                                         int refinements = 2);

}  // namespace ctpe
