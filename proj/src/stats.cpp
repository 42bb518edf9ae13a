#include "ctpe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ctpe/kde.hpp"

namespace ctpe {

double absolute_percentage_loss(double f_observed, double f_oracle) {
  if (f_observed < f_oracle - 1e-9) {
    throw std::domain_error("observed value is below the oracle");
  }
  if (f_oracle == 0.0) return f_observed;
  return (f_observed - f_oracle) / f_oracle;
}

WinLossTie wins_loses_ties(std::span<const double> a, std::span<const double> b,
                           bool lower_is_better) {
  if (a.size() != b.size()) throw std::invalid_argument("win/loss vectors differ in length");
  WinLossTie out;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == b[k]) {
      ++out.ties;
    } else if ((a[k] < b[k]) == lower_is_better) {
      ++out.wins;
    } else {
      ++out.losses;
    }
  }
  return out;
}

std::vector<double> average_rank(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences, Alternative alternative) {
  std::vector<double> d;
  for (double v : differences) {
    if (v != 0.0 && !std::isnan(v)) d.push_back(v);
  }
  if (d.empty()) throw std::invalid_argument("signed-rank test is undefined when all differences are zero");

  const std::size_t n = d.size();
  std::vector<double> mags(n);
  for (std::size_t k = 0; k < n; ++k) mags[k] = std::abs(d[k]);
  const auto ranks = average_rank(mags);

  WilcoxonResult res;
  res.n = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (d[k] > 0) res.statistic += ranks[k];
  }

  if (n <= 20) {
    // Doubled ranks are integers; count sign assignments per doubled W+.
    std::vector<int> doubled(n);
    int total = 0;
    for (std::size_t k = 0; k < n; ++k) {
      doubled[k] = static_cast<int>(std::lround(2.0 * ranks[k]));
      total += doubled[k];
    }
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    int reach = 0;
    for (int r : doubled) {
      for (int s = reach; s >= 0; --s) counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
      reach += r;
    }
    const double all = std::ldexp(1.0, static_cast<int>(n));
    const auto observed = static_cast<int>(std::lround(2.0 * res.statistic));
    double upper = 0.0, lower = 0.0;
    for (int s = 0; s <= total; ++s) {
      if (s >= observed) upper += counts[static_cast<std::size_t>(s)];
      if (s <= observed) lower += counts[static_cast<std::size_t>(s)];
    }
    upper /= all;
    lower /= all;
    switch (alternative) {
      case Alternative::greater: res.p_value = upper; break;
      case Alternative::less: res.p_value = lower; break;
      case Alternative::two_sided: res.p_value = std::min(1.0, 2.0 * std::min(upper, lower)); break;
    }
    res.exact = true;
    return res;
  }

  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
  std::vector<double> sorted = mags;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    var -= (t * t * t - t) / 48.0;
    i = j + 1;
  }
  const double sd = std::sqrt(var);
  const double dev = res.statistic - mean;
  switch (alternative) {
    case Alternative::greater: res.p_value = normal_cdf(-(dev - 0.5) / sd); break;
    case Alternative::less: res.p_value = normal_cdf((dev + 0.5) / sd); break;
    case Alternative::two_sided:
      res.p_value = std::min(1.0, 2.0 * normal_cdf(-(std::abs(dev) - 0.5) / sd));
      break;
  }
  res.exact = false;
  return res;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  const double a = values[n / 2 - 1];
  const double b = values[n / 2];
  if (std::isinf(a) && a == b) return a;
  return 0.5 * (a + b);
}

}  // namespace ctpe
