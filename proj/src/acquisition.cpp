#include "ctpe/acquisition.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ctpe {

namespace {

void check_gamma(double gamma_hat) {
  if (!(gamma_hat >= 0.0 && gamma_hat <= 1.0)) {
    throw std::invalid_argument("gamma_hat " + std::to_string(gamma_hat) + " outside [0, 1]");
  }
}

double log_add_exp(double a, double b) {
  const double m = std::max(a, b);
  if (m == -INFINITY) return m;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

double log_density_ratio(const AcquisitionComponent& component, const Config& x) {
  return component.good.log_pdf(x) - component.bad.log_pdf(x);
}

double density_ratio(const AcquisitionComponent& component, const Config& x) {
  return std::exp(log_density_ratio(component, x));
}

double relative_density_ratio(double ratio, double gamma_hat) {
  if (!(ratio > 0.0)) throw std::invalid_argument("density ratio must be positive");
  check_gamma(gamma_hat);
  return 1.0 / (gamma_hat + (1.0 - gamma_hat) / ratio);
}

double log_relative_density_ratio(double log_ratio, double gamma_hat) {
  check_gamma(gamma_hat);
  if (gamma_hat == 0.0) return log_ratio;
  if (gamma_hat == 1.0) return 0.0;
  return -log_add_exp(std::log(gamma_hat), std::log1p(-gamma_hat) - log_ratio);
}

double eci_log_score(std::span<const AcquisitionComponent> components, const Config& x) {
  double s = 0.0;
  for (const auto& c : components) {
    s += log_relative_density_ratio(log_density_ratio(c, x), c.gamma_hat);
  }
  return s;
}

double naive_log_score(std::span<const AcquisitionComponent> components, const Config& x) {
  double s = 0.0;
  for (const auto& c : components) s += log_density_ratio(c, x);
  return s;
}

std::size_t select_candidate_index(std::span<const ScoredCandidate> candidates) {
  if (candidates.empty()) throw std::invalid_argument("no candidates to select from");
  std::size_t best = 0;
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    const auto& a = candidates[k];
    const auto& b = candidates[best];
    if (a.total_log_score > b.total_log_score) {
      best = k;
    } else if (a.total_log_score == b.total_log_score &&
               std::pair(a.source_component, a.sample_index) <
                   std::pair(b.source_component, b.sample_index)) {
      best = k;
    }
  }
  return best;
}

const ScoredCandidate& select_candidate(std::span<const ScoredCandidate> candidates) {
  return candidates[select_candidate_index(candidates)];
}

double relative_ratio_product(std::span<const double> ratios, std::span<const double> gammas) {
  if (ratios.size() != gammas.size()) throw std::invalid_argument("ratio/gamma length mismatch");
  double p = 1.0;
  for (std::size_t k = 0; k < ratios.size(); ++k) p *= relative_density_ratio(ratios[k], gammas[k]);
  return p;
}

double relative_ratio_product_partial(std::span<const double> ratios,
                                      std::span<const double> gammas, std::size_t k) {
  if (k >= ratios.size()) throw std::invalid_argument("component index out of range");
  const double prod = relative_ratio_product(ratios, gammas);
  const double r = ratios[k];
  return (1.0 - gammas[k]) / (r * r) * relative_density_ratio(r, gammas[k]) * prod;
}

}  // namespace ctpe
