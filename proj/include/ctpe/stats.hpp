#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ctpe {

// (f_observed - f_oracle) / f_oracle. For f_oracle == 0 the absolute loss
// f_observed is returned. Throws std::domain_error if f_observed undercuts
// the oracle by more than 1e-9.
double absolute_percentage_loss(double f_observed, double f_oracle);

struct WinLossTie {
  std::size_t wins = 0;
  std::size_t losses = 0;
  std::size_t ties = 0;
};

// Elementwise comparison of a against b; exact equality is a tie.
WinLossTie wins_loses_ties(std::span<const double> a, std::span<const double> b,
                           bool lower_is_better = true);

// Rank 1 is the lowest value; tied values share the mean of their positions.
std::vector<double> average_rank(std::span<const double> values);

enum class Alternative { less, greater, two_sided };

struct WilcoxonResult {
  double statistic = 0.0;  // W+, sum of ranks of positive differences
  std::size_t n = 0;       // nonzero differences
  double p_value = 1.0;
  bool exact = true;
};

// Signed-rank test on paired differences. Zeros are dropped; `greater` tests
// for differences shifted above zero. Exact null distribution for n <= 20
// (ties handled through half-integer ranks), normal approximation with tie
// and continuity correction above. Throws std::invalid_argument when every
// difference is zero.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences, Alternative alternative);

double median(std::vector<double> values);

}  // namespace ctpe
