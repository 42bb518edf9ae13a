#include "ctpe/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ctpe {

ToyValue quad_shift(double x, double y) {
  return {(x + 2) * (x + 2) + (y + 2) * (y + 2), (x - 1) * (x - 1) + (y - 1) * (y - 1)};
}

ToyValue quad_overlap(double x, double y, double z) {
  return {x * x + y * y, (x - z) * (x - z) + (y - z) * (y - z)};
}

ToyValue sin_modal(double x1, double x2) {
  return {std::sin(x1) + x2, std::sin(x1) * std::sin(x2)};
}

double quad_shift_oracle(double threshold) {
  // Closest point of the feasible disc around (1, 1) to the vertex (-2, -2).
  const double gap = 3.0 * std::numbers::sqrt2 - std::sqrt(std::max(threshold, 0.0));
  return gap > 0.0 ? gap * gap : 0.0;
}

double quad_overlap_oracle(double z, double threshold) {
  const double gap = std::abs(z) * std::numbers::sqrt2 - std::sqrt(std::max(threshold, 0.0));
  return gap > 0.0 ? gap * gap : 0.0;
}

std::optional<double> sin_modal_oracle(double threshold) {
  if (threshold < -1.0) return std::nullopt;
  // x1 = 3pi/2 gives sin x1 = -1; the smallest x2 with sin x2 >= -threshold wins.
  if (threshold >= 0.0) return -1.0;
  return -1.0 + std::asin(-threshold);
}

namespace {

ToyProblem quad_overlap_problem(std::string name, double z) {
  return {std::move(name),
          SearchSpace({ParamDomain::numerical(-5, 5), ParamDomain::numerical(-5, 5)}),
          [z](const Config& v) { return quad_overlap(v[0], v[1], z).objective; },
          {[z](const Config& v) { return quad_overlap(v[0], v[1], z).constraint; }},
          [z](std::span<const double> t) -> std::optional<double> {
            return quad_overlap_oracle(z, t[0]);
          },
          {3.0}};
}

}  // namespace

ToyProblem make_problem(std::string_view name) {
  if (name == "quad_shift") {
    return {"quad_shift",
            SearchSpace({ParamDomain::numerical(-5, 5), ParamDomain::numerical(-5, 5)}),
            [](const Config& v) { return quad_shift(v[0], v[1]).objective; },
            {[](const Config& v) { return quad_shift(v[0], v[1]).constraint; }},
            [](std::span<const double> t) -> std::optional<double> {
              return quad_shift_oracle(t[0]);
            },
            {4.0}};
  }
  if (name == "quad_overlap") return quad_overlap_problem("quad_overlap", 2.3);
  if (name == "quad_overlap_large") return quad_overlap_problem("quad_overlap_large", 0.5);
  if (name == "sin_modal") {
    const double two_pi = 2.0 * std::numbers::pi;
    return {"sin_modal",
            SearchSpace({ParamDomain::numerical(0, two_pi), ParamDomain::numerical(0, two_pi)}),
            [](const Config& v) { return sin_modal(v[0], v[1]).objective; },
            {[](const Config& v) { return sin_modal(v[0], v[1]).constraint; }},
            [](std::span<const double> t) { return sin_modal_oracle(t[0]); },
            {-0.95}};
  }
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

std::vector<std::string> problem_names() {
  return {"quad_shift", "quad_overlap", "quad_overlap_large", "sin_modal"};
}

double threshold_for_quantile(const ToyProblem& problem, std::size_t index, double gamma_true,
                              std::size_t n_samples, std::uint64_t seed) {
  if (index >= problem.constraints.size()) throw std::invalid_argument("constraint index out of range");
  if (!(gamma_true > 0.0 && gamma_true <= 1.0)) throw std::invalid_argument("gamma_true must be in (0, 1]");
  if (n_samples < 10000) throw std::invalid_argument("threshold calibration needs at least 1e4 samples");
  RandomStream rng(seed);
  std::vector<double> values(n_samples);
  for (auto& v : values) v = problem.constraints[index](sample_uniform(problem.space, rng));
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::floor(gamma_true * static_cast<double>(n_samples)));
  return values[std::clamp<std::size_t>(rank, 1, n_samples) - 1];
}

std::optional<double> grid_search_oracle(const ToyProblem& problem,
                                         std::span<const double> thresholds,
                                         std::size_t points_per_dim, int refinements) {
  const std::size_t dims = problem.space.size();
  if (thresholds.size() != problem.constraints.size()) {
    throw std::invalid_argument("one threshold per constraint expected");
  }
  if (points_per_dim < 2) throw std::invalid_argument("grid needs at least 2 points per dimension");
  std::vector<double> lo(dims), hi(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    if (!problem.space[d].is_numerical()) throw std::invalid_argument("grid search needs numerical dims");
    lo[d] = problem.space[d].lower();
    hi[d] = problem.space[d].upper();
  }

  std::optional<double> best;
  Config best_x;
  for (int level = 0; level <= refinements; ++level) {
    std::vector<std::size_t> counter(dims, 0);
    Config x(dims);
    bool done = false;
    while (!done) {
      for (std::size_t d = 0; d < dims; ++d) {
        x[d] = lo[d] + (hi[d] - lo[d]) * static_cast<double>(counter[d]) /
                           static_cast<double>(points_per_dim - 1);
      }
      bool feasible = true;
      for (std::size_t i = 0; i < thresholds.size() && feasible; ++i) {
        feasible = problem.constraints[i](x) <= thresholds[i];
      }
      if (feasible) {
        const double f = problem.objective(x);
        if (!best || f < *best) {
          best = f;
          best_x = x;
        }
      }
      done = true;
      for (std::size_t d = 0; d < dims; ++d) {
        if (++counter[d] < points_per_dim) {
          done = false;
          break;
        }
        counter[d] = 0;
      }
    }
    if (!best) return std::nullopt;
    for (std::size_t d = 0; d < dims; ++d) {
      const double step = (hi[d] - lo[d]) / static_cast<double>(points_per_dim - 1);
      lo[d] = std::max(problem.space[d].lower(), best_x[d] - 2.0 * step);
      hi[d] = std::min(problem.space[d].upper(), best_x[d] + 2.0 * step);
    }
  }
  return best;
}

}  // namespace ctpe
