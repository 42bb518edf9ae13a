#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ctpe/acquisition.hpp"
#include "ctpe/search_space.hpp"
#include "ctpe/split.hpp"

namespace ctpe {

enum class Mode { ctpe, naive, vanilla_tpe, random };

std::string_view to_string(Mode mode);
// Throws std::invalid_argument for unknown names.
Mode parse_mode(std::string_view name);

struct ControlParams {
  int n_init = 10;
  int n_samples = 24;
  // Number of partial observations a driver collects up front. The optimizer
  // itself only stores what it is told.
  int n_partial = 200;
};

// Everything ask() computed on the way to its suggestion.
struct AskResult {
  Config config;
  bool random_draw = false;
  // One entry per acquisition component (objective first). Split indices
  // refer to the view the component was split on.
  std::vector<SplitResult> splits;
  std::vector<std::size_t> eligible_counts;
  std::vector<AcquisitionComponent> components;
  std::vector<ScoredCandidate> pool;
  std::size_t selected = 0;
};

class Optimizer {
 public:
  // Throws std::invalid_argument for inconsistent specs or parameters.
  Optimizer(SearchSpace space, std::vector<ConstraintSpec> constraints, Mode mode,
            ControlParams params, std::uint64_t seed);

  // Side-effect free: repeated calls return the same config until the next tell.
  Config ask() const;
  AskResult ask_detailed() const;

  // Appends a full observation or a hard-failure record.
  void tell(Observation obs);
  void tell(const Config& config, double objective, const std::vector<double>& constraint_values);

  // Appends a partial observation; keys are the cheap constraint indices.
  void tell_partial(const Config& config, const std::map<std::size_t, double>& cheap_values);

  // Observations a component is split on. Component 0 is the objective.
  std::vector<Observation> augmented_view(std::size_t component) const;

  std::optional<std::pair<Config, double>> best_feasible() const;

  const SearchSpace& space() const { return space_; }
  const std::vector<ConstraintSpec>& constraints() const { return constraints_; }
  Mode mode() const { return mode_; }
  const ControlParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Observation>& observations() const { return observations_; }
  const std::vector<Observation>& partials() const { return partials_; }
  const std::vector<std::size_t>& cheap_indices() const { return cheap_; }
  std::size_t component_count() const;

  nlohmann::json export_state() const;
  static Optimizer import_state(const nlohmann::json& doc);

 private:
  struct ComponentModel {
    AcquisitionComponent acq;
    SplitResult split;
  };

  ComponentModel build_component(std::size_t i) const;
  ComponentModel neutral_component() const;
  ComponentModel fit_split(const std::vector<Observation>& view, SplitResult split) const;
  double score(const ScoredCandidate& c) const;

  SearchSpace space_;
  std::vector<ConstraintSpec> constraints_;
  Mode mode_;
  ControlParams params_;
  std::uint64_t seed_;
  std::vector<std::size_t> cheap_;
  std::vector<Observation> observations_;
  std::vector<Observation> partials_;
  std::optional<std::size_t> best_index_;
};

nlohmann::json to_json(const Observation& obs);
Observation observation_from_json(const nlohmann::json& doc);

}  // namespace ctpe
