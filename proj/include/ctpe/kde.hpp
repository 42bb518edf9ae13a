#pragma once

#include <span>
#include <vector>

#include "ctpe/random.hpp"
#include "ctpe/search_space.hpp"

namespace ctpe {

// Product-kernel density estimator over a SearchSpace with one extra uniform
// component (the non-informative prior). Every component, prior included,
// carries weight 1 / (N + 1).
//
// Numerical dimensions use a Gaussian truncated to [lower, upper] and
// renormalized there. Categorical dimensions use the Aitchison-Aitken kernel.
class Kde {
 public:
  // Bandwidths come from bandwidth_normal_reference, categorical sharpness
  // from default_sharpness. Throws std::invalid_argument on invalid centers.
  static Kde fit(const SearchSpace& space, std::span<const Config> observations);

  // Explicit construction. `bandwidths` and `sharpness` have one entry per
  // dimension; entries for dimensions of the other kind are ignored.
  static Kde from_parts(const SearchSpace& space, std::vector<Config> centers,
                        std::vector<double> bandwidths, std::vector<double> sharpness);

  // Prior-only estimator (uniform over the space).
  static Kde prior(const SearchSpace& space);

  double pdf(const Config& x) const;
  double log_pdf(const Config& x) const;

  Config sample(RandomStream& rng) const;

  const SearchSpace& space() const { return space_; }
  const std::vector<Config>& centers() const { return centers_; }
  const std::vector<double>& bandwidths() const { return bandwidths_; }
  const std::vector<double>& sharpness() const { return sharpness_; }
  std::size_t component_count() const { return centers_.size() + 1; }
  double prior_weight() const { return 1.0 / static_cast<double>(component_count()); }
  // Observation-kernel weights followed by the prior's weight.
  std::vector<double> weights() const;

 private:
  Kde(const SearchSpace& space, std::vector<Config> centers, std::vector<double> bandwidths,
      std::vector<double> sharpness);

  double log_prior_density() const;
  double log_kernel(std::size_t j, const Config& x) const;

  SearchSpace space_;
  std::vector<Config> centers_;
  std::vector<double> bandwidths_;
  std::vector<double> sharpness_;
  // log of the truncated-Gaussian mass on the domain, per (center, dim).
  std::vector<double> log_mass_;
};

// Normal-reference rule: 1.059 * sigma * n^(-1/(D+4)) with
// sigma = min(sample std, IQR / 1.349), clamped to [1e-3 * range, range].
double bandwidth_normal_reference(std::span<const double> values, const ParamDomain& domain,
                                  std::size_t dim_count);

// The rule above for an already-computed sigma.
double normal_reference_scale(double sigma, std::size_t n, std::size_t dim_count, double range);

// Smallest bandwidth Kde::fit uses for n observations: range / (10 (n + 1)).
double fit_bandwidth_floor(double range, std::size_t n);

// Probability of `category` under a kernel centered at `center`.
double aitchison_aitken(int category, int center, int cardinality, double sharpness);

// clamp(1 - 1/(1 + n), 1/K, 1) for n observations.
double default_sharpness(std::size_t n, int cardinality);

// Standard normal CDF and quantile.
double normal_cdf(double z);
double normal_quantile(double p);

// Numerically stable log(sum(exp(v))). Returns -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> v);

}  // namespace ctpe
