#include "ctpe/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ctpe {

namespace {

std::vector<std::size_t> with_objective(std::span<const Observation> observations) {
  std::vector<std::size_t> idx;
  for (std::size_t n = 0; n < observations.size(); ++n) {
    if (observations[n].objective) idx.push_back(n);
  }
  if (idx.empty()) throw std::invalid_argument("objective split needs an observation with an objective");
  return idx;
}

void sort_by_objective(std::vector<std::size_t>& idx, std::span<const Observation> observations) {
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return *observations[a].objective < *observations[b].objective;
  });
}

SplitResult finish(std::vector<std::size_t> good, std::vector<std::size_t> bad) {
  std::sort(good.begin(), good.end());
  std::sort(bad.begin(), bad.end());
  SplitResult r;
  const double total = static_cast<double>(good.size() + bad.size());
  r.gamma_hat = static_cast<double>(good.size()) / total;
  r.good = std::move(good);
  r.bad = std::move(bad);
  return r;
}

SplitResult take_prefix(const std::vector<std::size_t>& order, std::size_t n_good) {
  return finish({order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_good)},
                {order.begin() + static_cast<std::ptrdiff_t>(n_good), order.end()});
}

// Indices with constraint `index` measured, plus their values.
std::vector<std::size_t> measured(std::span<const Observation> observations, std::size_t index) {
  std::vector<std::size_t> idx;
  for (std::size_t n = 0; n < observations.size(); ++n) {
    const auto& c = observations[n].constraints;
    if (index < c.size() && c[index]) idx.push_back(n);
  }
  if (idx.empty()) {
    throw std::invalid_argument("constraint " + std::to_string(index) + " has no measured values");
  }
  return idx;
}

SplitResult partition_at(std::span<const Observation> observations,
                         const std::vector<std::size_t>& idx, std::size_t index, double cut) {
  std::vector<std::size_t> good, bad;
  for (std::size_t n : idx) {
    (*observations[n].constraints[index] <= cut ? good : bad).push_back(n);
  }
  return finish(std::move(good), std::move(bad));
}

}  // namespace

bool is_feasible(const Observation& obs, std::span<const ConstraintSpec> specs) {
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].kind == ConstraintKind::hard) {
      if (i >= obs.hard_ok.size() || !obs.hard_ok[i] || !*obs.hard_ok[i]) return false;
    } else {
      if (i >= obs.constraints.size() || !obs.constraints[i]) return false;
      if (!(*obs.constraints[i] <= specs[i].threshold)) return false;
    }
  }
  return true;
}

std::size_t top_count(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)) / 4.0));
}

SplitResult split_objective_feasible(std::span<const Observation> observations,
                                     std::span<const ConstraintSpec> specs) {
  auto order = with_objective(observations);
  sort_by_objective(order, observations);
  const std::size_t n_good = top_count(order.size());
  std::size_t feasible_seen = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (is_feasible(observations[order[k]], specs) && ++feasible_seen == n_good) {
      return take_prefix(order, k + 1);
    }
  }
  return take_prefix(order, order.size());
}

SplitResult split_objective_vanilla(std::span<const Observation> observations) {
  auto order = with_objective(observations);
  sort_by_objective(order, observations);
  return take_prefix(order, top_count(order.size()));
}

SplitResult split_constraint(std::span<const Observation> observations, std::size_t index,
                             double threshold) {
  const auto idx = measured(observations, index);
  std::optional<double> cut;
  double best = *observations[idx.front()].constraints[index];
  for (std::size_t n : idx) {
    const double v = *observations[n].constraints[index];
    best = std::min(best, v);
    if (v <= threshold && (!cut || v > *cut)) cut = v;
  }
  return partition_at(observations, idx, index, cut.value_or(best));
}

SplitResult split_constraint_naive(std::span<const Observation> observations, std::size_t index,
                                   double threshold) {
  return partition_at(observations, measured(observations, index), index, threshold);
}

SplitResult split_constraint_hard(std::span<const Observation> observations, std::size_t index) {
  std::vector<std::size_t> good, bad;
  for (std::size_t n = 0; n < observations.size(); ++n) {
    const auto& flags = observations[n].hard_ok;
    if (index >= flags.size() || !flags[index]) continue;
    (*flags[index] ? good : bad).push_back(n);
  }
  if (good.empty() && bad.empty()) {
    throw std::invalid_argument("hard constraint " + std::to_string(index) + " has no flags");
  }
  return finish(std::move(good), std::move(bad));
}

}  // namespace ctpe
