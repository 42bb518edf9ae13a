#include "ctpe/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/erf.hpp>

namespace ctpe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Linear-interpolation quantile of sorted data.
double quantile_sorted(const std::vector<double>& s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + frac * (s[hi] - s[lo]);
}

// Mass of N(center, h^2) on [lower, upper] for a center inside the interval.
double truncated_mass(double center, double h, double lower, double upper) {
  const double a = (lower - center) / h;
  const double b = (upper - center) / h;
  // 1 - Phi(-b) - Phi(a) keeps precision for a <= 0 <= b.
  return 1.0 - normal_cdf(-b) - normal_cdf(a);
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return -kInf;
  const double m = *std::max_element(v.begin(), v.end());
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double normal_reference_scale(double sigma, std::size_t n, std::size_t dim_count, double range) {
  const double h = 1.059 * sigma *
                   std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(dim_count) + 4.0));
  return std::clamp(h, 1e-3 * range, range);
}

double bandwidth_normal_reference(std::span<const double> values, const ParamDomain& domain,
                                  std::size_t dim_count) {
  if (values.empty()) throw std::invalid_argument("bandwidth needs at least one value");
  if (!domain.is_numerical()) throw std::invalid_argument("bandwidth needs a numerical domain");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double sigma = std::min(sample_std(values), iqr / 1.349);
  return normal_reference_scale(sigma, values.size(), dim_count, domain.range());
}

double fit_bandwidth_floor(double range, std::size_t n) {
  return range / (10.0 * (static_cast<double>(n) + 1.0));
}

double aitchison_aitken(int category, int center, int cardinality, double sharpness) {
  if (cardinality < 2) throw std::invalid_argument("cardinality must be at least 2");
  if (category < 0 || category >= cardinality || center < 0 || center >= cardinality) {
    throw std::invalid_argument("category index out of range");
  }
  const double min_sharpness = 1.0 / cardinality;
  if (!(sharpness >= min_sharpness - 1e-15 && sharpness <= 1.0)) {
    throw std::invalid_argument("sharpness " + std::to_string(sharpness) + " outside [1/K, 1]");
  }
  if (category == center) return sharpness;
  return (1.0 - sharpness) / (cardinality - 1);
}

double default_sharpness(std::size_t n, int cardinality) {
  const double lambda = 1.0 - 1.0 / (1.0 + static_cast<double>(n));
  return std::clamp(lambda, 1.0 / cardinality, 1.0);
}

Kde::Kde(const SearchSpace& space, std::vector<Config> centers, std::vector<double> bandwidths,
         std::vector<double> sharpness)
    : space_(space),
      centers_(std::move(centers)),
      bandwidths_(std::move(bandwidths)),
      sharpness_(std::move(sharpness)) {
  const std::size_t dims = space_.size();
  if (bandwidths_.size() != dims || sharpness_.size() != dims) {
    throw std::invalid_argument("bandwidths and sharpness need one entry per dimension");
  }
  for (const auto& c : centers_) require_valid(space_, c);
  for (std::size_t d = 0; d < dims; ++d) {
    const auto& dom = space_[d];
    if (dom.is_numerical()) {
      if (!(bandwidths_[d] > 0.0) || !std::isfinite(bandwidths_[d])) {
        throw std::invalid_argument("bandwidth must be positive in dim " + std::to_string(d));
      }
    } else {
      const double s = sharpness_[d];
      if (!(s >= 1.0 / dom.cardinality() - 1e-15 && s <= 1.0)) {
        throw std::invalid_argument("sharpness outside [1/K, 1] in dim " + std::to_string(d));
      }
    }
  }
  log_mass_.assign(centers_.size() * dims, 0.0);
  for (std::size_t j = 0; j < centers_.size(); ++j) {
    for (std::size_t d = 0; d < dims; ++d) {
      const auto& dom = space_[d];
      if (!dom.is_numerical()) continue;
      log_mass_[j * dims + d] =
          std::log(truncated_mass(centers_[j][d], bandwidths_[d], dom.lower(), dom.upper()));
    }
  }
}

Kde Kde::from_parts(const SearchSpace& space, std::vector<Config> centers,
                    std::vector<double> bandwidths, std::vector<double> sharpness) {
  return Kde(space, std::move(centers), std::move(bandwidths), std::move(sharpness));
}

Kde Kde::prior(const SearchSpace& space) { return fit(space, {}); }

Kde Kde::fit(const SearchSpace& space, std::span<const Config> observations) {
  for (const auto& x : observations) require_valid(space, x);
  const std::size_t n = observations.size();
  std::vector<double> bandwidths(space.size(), 0.0);
  std::vector<double> sharpness(space.size(), 0.0);
  // The prior enters the bandwidth estimate as one more value at the domain
  // midpoint, and the result never drops below range / (10 (n + 1)), so a
  // good set of one or two points still spreads its samples.
  std::vector<double> column(n + 1);
  for (std::size_t d = 0; d < space.size(); ++d) {
    const auto& dom = space[d];
    if (dom.is_numerical()) {
      if (n == 0) {
        bandwidths[d] = dom.range();
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) column[j] = observations[j][d];
      column[n] = 0.5 * (dom.lower() + dom.upper());
      const double h = bandwidth_normal_reference(column, dom, space.size());
      bandwidths[d] = std::max(h, fit_bandwidth_floor(dom.range(), n));
    } else {
      sharpness[d] = default_sharpness(n, dom.cardinality());
    }
  }
  return Kde(space, std::vector<Config>(observations.begin(), observations.end()),
             std::move(bandwidths), std::move(sharpness));
}

std::vector<double> Kde::weights() const {
  return std::vector<double>(component_count(), prior_weight());
}

double Kde::log_prior_density() const {
  double lp = 0.0;
  for (const auto& dom : space_.dims()) {
    lp -= dom.is_numerical() ? std::log(dom.range()) : std::log(dom.cardinality());
  }
  return lp;
}

double Kde::log_kernel(std::size_t j, const Config& x) const {
  const std::size_t dims = space_.size();
  const Config& c = centers_[j];
  double lk = 0.0;
  for (std::size_t d = 0; d < dims; ++d) {
    const auto& dom = space_[d];
    if (dom.is_numerical()) {
      const double h = bandwidths_[d];
      const double z = (x[d] - c[d]) / h;
      lk += -0.5 * z * z - kLogSqrt2Pi - std::log(h) - log_mass_[j * dims + d];
    } else {
      const int k = dom.cardinality();
      const double s = sharpness_[d];
      const double p = x[d] == c[d] ? s : (1.0 - s) / (k - 1);
      lk += std::log(p);
    }
  }
  return lk;
}

double Kde::log_pdf(const Config& x) const {
  require_valid(space_, x);
  const double log_w = std::log(prior_weight());
  std::vector<double> terms;
  terms.reserve(component_count());
  for (std::size_t j = 0; j < centers_.size(); ++j) terms.push_back(log_w + log_kernel(j, x));
  terms.push_back(log_w + log_prior_density());
  return log_sum_exp(terms);
}

double Kde::pdf(const Config& x) const { return std::exp(log_pdf(x)); }

Config Kde::sample(RandomStream& rng) const {
  const std::size_t comp = static_cast<std::size_t>(rng.index(component_count()));
  const bool from_prior = comp == centers_.size();
  Config x(space_.size());
  for (std::size_t d = 0; d < space_.size(); ++d) {
    const auto& dom = space_[d];
    const double u = rng.uniform();
    if (dom.is_numerical()) {
      if (from_prior) {
        x[d] = dom.lower() + u * dom.range();
        continue;
      }
      const double mu = centers_[comp][d];
      const double h = bandwidths_[d];
      const double lo = normal_cdf((dom.lower() - mu) / h);
      const double mass = truncated_mass(mu, h, dom.lower(), dom.upper());
      const double v = mu + h * normal_quantile(lo + u * mass);
      x[d] = std::clamp(v, dom.lower(), dom.upper());
    } else {
      const int k = dom.cardinality();
      if (from_prior) {
        x[d] = std::min(std::floor(u * k), static_cast<double>(k - 1));
        continue;
      }
      const int center = static_cast<int>(centers_[comp][d]);
      const double s = sharpness_[d];
      if (u < s) {
        x[d] = center;
        continue;
      }
      // Spread the remaining mass evenly over the other k - 1 categories.
      auto other = static_cast<int>((u - s) / (1.0 - s) * (k - 1));
      other = std::min(other, k - 2);
      x[d] = other >= center ? other + 1 : other;
    }
  }
  return x;
}

}  // namespace ctpe
