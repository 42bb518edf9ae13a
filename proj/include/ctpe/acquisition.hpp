#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctpe/kde.hpp"

namespace ctpe {

// Good/bad densities for one component. Component 0 is the objective,
// components 1..C are the constraints.
struct AcquisitionComponent {
  Kde good;
  Kde bad;
  double gamma_hat;
};

struct ScoredCandidate {
  Config config;
  std::vector<double> log_ratios;           // log r_i
  std::vector<double> log_relative_ratios;  // log r^rel_i
  double total_log_score = 0.0;
  std::size_t source_component = 0;
  std::size_t sample_index = 0;
};

double log_density_ratio(const AcquisitionComponent& component, const Config& x);
double density_ratio(const AcquisitionComponent& component, const Config& x);

// (gamma + (1 - gamma) / r)^-1. Throws std::invalid_argument for r <= 0 or
// gamma outside [0, 1].
double relative_density_ratio(double ratio, double gamma_hat);
// Same quantity from log r, computed without overflow.
double log_relative_density_ratio(double log_ratio, double gamma_hat);

// Sum of log r^rel_i over all components.
double eci_log_score(std::span<const AcquisitionComponent> components, const Config& x);
// Sum of log r_i over all components.
double naive_log_score(std::span<const AcquisitionComponent> components, const Config& x);

// Largest total_log_score; ties go to the smallest (source_component,
// sample_index). Throws std::invalid_argument on an empty list.
std::size_t select_candidate_index(std::span<const ScoredCandidate> candidates);
const ScoredCandidate& select_candidate(std::span<const ScoredCandidate> candidates);

// prod_k r^rel_k for explicit ratios and quantiles.
double relative_ratio_product(std::span<const double> ratios, std::span<const double> gammas);

// Closed-form d(prod_k r^rel_k) / d r_k = (1 - gamma_k) / r_k^2 * r^rel_k * prod.
double relative_ratio_product_partial(std::span<const double> ratios,
                                      std::span<const double> gammas, std::size_t k);

}  // namespace ctpe
