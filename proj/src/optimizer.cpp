#include "ctpe/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctpe {

namespace {

// Stream labels: the iteration counter comes first, then the purpose.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kComponentStreamBase = 1;

std::vector<Config> gather(const std::vector<Observation>& view,
                           const std::vector<std::size_t>& idx) {
  std::vector<Config> out;
  out.reserve(idx.size());
  for (std::size_t n : idx) out.push_back(view[n].config);
  return out;
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::ctpe: return "ctpe";
    case Mode::naive: return "naive";
    case Mode::vanilla_tpe: return "vanilla_tpe";
    case Mode::random: return "random";
  }
  return "unknown";
}

Mode parse_mode(std::string_view name) {
  for (Mode m : {Mode::ctpe, Mode::naive, Mode::vanilla_tpe, Mode::random}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

Optimizer::Optimizer(SearchSpace space, std::vector<ConstraintSpec> constraints, Mode mode,
                     ControlParams params, std::uint64_t seed)
    : space_(std::move(space)),
      constraints_(std::move(constraints)),
      mode_(mode),
      params_(params),
      seed_(seed) {
  if (params_.n_init < 1) throw std::invalid_argument("n_init must be at least 1");
  if (params_.n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
  if (params_.n_partial < 0) throw std::invalid_argument("n_partial must be nonnegative");
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const auto& c = constraints_[i];
    if (c.kind == ConstraintKind::measurable && !std::isfinite(c.threshold)) {
      throw std::invalid_argument("constraint " + std::to_string(i) + " needs a finite threshold");
    }
    if (c.kind == ConstraintKind::hard && c.cheap) {
      throw std::invalid_argument("hard constraint " + std::to_string(i) + " cannot be cheap");
    }
    if (c.cheap) cheap_.push_back(i);
  }
}

std::size_t Optimizer::component_count() const {
  switch (mode_) {
    case Mode::random: return 0;
    case Mode::vanilla_tpe: return 1;
    default: return 1 + constraints_.size();
  }
}

void Optimizer::tell(Observation obs) {
  require_valid(space_, obs.config);
  const std::size_t c = constraints_.size();
  if (obs.constraints.size() != c) {
    throw std::invalid_argument("expected " + std::to_string(c) + " constraint values, got " +
                                std::to_string(obs.constraints.size()));
  }
  if (obs.hard_ok.empty()) obs.hard_ok.resize(c);
  if (obs.hard_ok.size() != c) {
    throw std::invalid_argument("expected " + std::to_string(c) + " hard flags, got " +
                                std::to_string(obs.hard_ok.size()));
  }
  bool any_hard_failure = false;
  for (std::size_t i = 0; i < c; ++i) {
    const bool hard = constraints_[i].kind == ConstraintKind::hard;
    if (hard && obs.constraints[i]) {
      throw std::invalid_argument("hard constraint " + std::to_string(i) + " takes a flag, not a value");
    }
    if (!hard && obs.hard_ok[i]) {
      throw std::invalid_argument("constraint " + std::to_string(i) + " is not a hard constraint");
    }
    if (obs.constraints[i] && !std::isfinite(*obs.constraints[i])) {
      throw std::invalid_argument("constraint values must be finite");
    }
    if (hard && obs.hard_ok[i] && !*obs.hard_ok[i]) any_hard_failure = true;
  }
  if (obs.objective) {
    if (!std::isfinite(*obs.objective)) throw std::invalid_argument("objective must be finite");
    for (std::size_t i = 0; i < c; ++i) {
      const bool hard = constraints_[i].kind == ConstraintKind::hard;
      if (hard ? !(obs.hard_ok[i] && *obs.hard_ok[i]) : !obs.constraints[i]) {
        throw std::invalid_argument("full observation is missing constraint " + std::to_string(i));
      }
    }
  } else if (!any_hard_failure) {
    throw std::invalid_argument("an observation without objective must report a hard failure");
  }

  observations_.push_back(std::move(obs));
  const auto& added = observations_.back();
  if (added.objective && is_feasible(added, constraints_) &&
      (!best_index_ || *added.objective < *observations_[*best_index_].objective)) {
    best_index_ = observations_.size() - 1;
  }
}

void Optimizer::tell(const Config& config, double objective,
                     const std::vector<double>& constraint_values) {
  Observation obs;
  obs.config = config;
  obs.objective = objective;
  obs.constraints.assign(constraint_values.begin(), constraint_values.end());
  tell(std::move(obs));
}

void Optimizer::tell_partial(const Config& config,
                             const std::map<std::size_t, double>& cheap_values) {
  require_valid(space_, config);
  for (const auto& [i, v] : cheap_values) {
    if (i >= constraints_.size() || !constraints_[i].cheap) {
      throw std::invalid_argument("constraint " + std::to_string(i) + " is not cheap");
    }
    if (!std::isfinite(v)) throw std::invalid_argument("constraint values must be finite");
  }
  if (cheap_values.size() != cheap_.size()) {
    throw std::invalid_argument("partial observation must cover every cheap constraint");
  }
  Observation obs;
  obs.config = config;
  obs.constraints.resize(constraints_.size());
  obs.hard_ok.resize(constraints_.size());
  for (const auto& [i, v] : cheap_values) obs.constraints[i] = v;
  partials_.push_back(std::move(obs));
}

std::vector<Observation> Optimizer::augmented_view(std::size_t component) const {
  if (component > constraints_.size()) {
    throw std::out_of_range("component " + std::to_string(component) + " out of range");
  }
  std::vector<Observation> view = observations_;
  if (component > 0 && constraints_[component - 1].cheap) {
    view.insert(view.end(), partials_.begin(), partials_.end());
  }
  return view;
}

std::optional<std::pair<Config, double>> Optimizer::best_feasible() const {
  if (!best_index_) return std::nullopt;
  const auto& obs = observations_[*best_index_];
  return std::pair(obs.config, *obs.objective);
}

Optimizer::ComponentModel Optimizer::neutral_component() const {
  return {{Kde::prior(space_), Kde::prior(space_), 1.0}, SplitResult{}};
}

Optimizer::ComponentModel Optimizer::fit_split(const std::vector<Observation>& view,
                                               SplitResult split) const {
  const auto good = gather(view, split.good);
  const auto bad = gather(view, split.bad);
  const double gamma = split.gamma_hat;
  return {{Kde::fit(space_, good), Kde::fit(space_, bad), gamma}, std::move(split)};
}

Optimizer::ComponentModel Optimizer::build_component(std::size_t i) const {
  const auto view = augmented_view(i);
  if (i == 0) {
    const bool any = std::any_of(view.begin(), view.end(),
                                 [](const Observation& o) { return o.objective.has_value(); });
    if (!any) return neutral_component();
    return fit_split(view, mode_ == Mode::ctpe ? split_objective_feasible(view, constraints_)
                                               : split_objective_vanilla(view));
  }
  const std::size_t ci = i - 1;
  const auto& spec = constraints_[ci];
  if (spec.kind == ConstraintKind::hard) {
    const bool any = std::any_of(view.begin(), view.end(), [ci](const Observation& o) {
      return ci < o.hard_ok.size() && o.hard_ok[ci].has_value();
    });
    if (!any) return neutral_component();
    return fit_split(view, split_constraint_hard(view, ci));
  }
  const bool any = std::any_of(view.begin(), view.end(), [ci](const Observation& o) {
    return ci < o.constraints.size() && o.constraints[ci].has_value();
  });
  if (!any) return neutral_component();
  return fit_split(view, mode_ == Mode::naive ? split_constraint_naive(view, ci, spec.threshold)
                                              : split_constraint(view, ci, spec.threshold));
}

double Optimizer::score(const ScoredCandidate& c) const {
  double s = 0.0;
  switch (mode_) {
    case Mode::ctpe:
      for (double v : c.log_relative_ratios) s += v;
      return s;
    case Mode::naive:
      for (double v : c.log_ratios) s += v;
      return s;
    default:
      return c.log_ratios.front();
  }
}

AskResult Optimizer::ask_detailed() const {
  AskResult result;
  const auto counter = static_cast<std::uint64_t>(observations_.size());
  if (mode_ == Mode::random || observations_.size() < static_cast<std::size_t>(params_.n_init)) {
    auto rng = RandomStream::derive(seed_, {counter, kInitStream});
    result.config = sample_uniform(space_, rng);
    result.random_draw = true;
    return result;
  }

  const std::size_t n_comp = component_count();
  for (std::size_t i = 0; i < n_comp; ++i) {
    auto model = build_component(i);
    result.eligible_counts.push_back(model.split.eligible_count());
    result.splits.push_back(std::move(model.split));
    result.components.push_back(std::move(model.acq));
  }

  const auto n_samples = static_cast<std::size_t>(params_.n_samples);
  result.pool.reserve(n_comp * n_samples);
  for (std::size_t i = 0; i < n_comp; ++i) {
    auto rng = RandomStream::derive(seed_, {counter, kComponentStreamBase + i});
    for (std::size_t j = 0; j < n_samples; ++j) {
      ScoredCandidate cand;
      cand.config = result.components[i].good.sample(rng);
      cand.source_component = i;
      cand.sample_index = j;
      result.pool.push_back(std::move(cand));
    }
  }

  for (auto& cand : result.pool) {
    for (const auto& comp : result.components) {
      const double lr = log_density_ratio(comp, cand.config);
      cand.log_ratios.push_back(lr);
      cand.log_relative_ratios.push_back(log_relative_density_ratio(lr, comp.gamma_hat));
    }
    cand.total_log_score = score(cand);
  }

  result.selected = select_candidate_index(result.pool);
  result.config = result.pool[result.selected].config;
  return result;
}

Config Optimizer::ask() const { return ask_detailed().config; }

nlohmann::json to_json(const Observation& obs) {
  nlohmann::json doc;
  doc["config"] = obs.config;
  doc["objective"] = obs.objective ? nlohmann::json(*obs.objective) : nlohmann::json(nullptr);
  auto cons = nlohmann::json::array();
  for (const auto& v : obs.constraints) cons.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  doc["constraints"] = cons;
  auto flags = nlohmann::json::array();
  for (const auto& v : obs.hard_ok) flags.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  doc["hard_ok"] = flags;
  return doc;
}

Observation observation_from_json(const nlohmann::json& doc) {
  Observation obs;
  obs.config = doc.at("config").get<Config>();
  if (!doc.at("objective").is_null()) obs.objective = doc.at("objective").get<double>();
  for (const auto& v : doc.at("constraints")) {
    obs.constraints.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
  }
  for (const auto& v : doc.at("hard_ok")) {
    obs.hard_ok.push_back(v.is_null() ? std::nullopt : std::optional<bool>(v.get<bool>()));
  }
  return obs;
}

nlohmann::json Optimizer::export_state() const {
  nlohmann::json doc;
  doc["format"] = "ctpe-state";
  doc["version"] = 1;
  doc["space"] = to_json(space_);
  auto cons = nlohmann::json::array();
  for (const auto& c : constraints_) {
    if (c.kind == ConstraintKind::hard) {
      cons.push_back({{"kind", "hard"}});
    } else {
      cons.push_back({{"kind", "measurable"}, {"threshold", c.threshold}, {"cheap", c.cheap}});
    }
  }
  doc["constraints"] = cons;
  doc["mode"] = std::string(to_string(mode_));
  doc["params"] = {{"n_init", params_.n_init},
                   {"n_samples", params_.n_samples},
                   {"n_partial", params_.n_partial}};
  doc["seed"] = seed_;
  doc["rng_counter"] = observations_.size();
  auto obs = nlohmann::json::array();
  for (const auto& o : observations_) obs.push_back(to_json(o));
  doc["observations"] = obs;
  auto parts = nlohmann::json::array();
  for (const auto& o : partials_) parts.push_back(to_json(o));
  doc["partials"] = parts;
  return doc;
}

Optimizer Optimizer::import_state(const nlohmann::json& doc) {
  if (doc.value("format", "") != "ctpe-state" || doc.value("version", 0) != 1) {
    throw std::invalid_argument("not a version 1 ctpe-state document");
  }
  std::vector<ConstraintSpec> cons;
  for (const auto& c : doc.at("constraints")) {
    const auto kind = c.at("kind").get<std::string>();
    if (kind == "hard") {
      cons.push_back(ConstraintSpec::hard());
    } else if (kind == "measurable") {
      cons.push_back(ConstraintSpec::measurable(c.at("threshold").get<double>(),
                                                c.at("cheap").get<bool>()));
    } else {
      throw std::invalid_argument("unknown constraint kind '" + kind + "'");
    }
  }
  ControlParams params;
  const auto& p = doc.at("params");
  params.n_init = p.at("n_init").get<int>();
  params.n_samples = p.at("n_samples").get<int>();
  params.n_partial = p.at("n_partial").get<int>();
  Optimizer opt(search_space_from_json(doc.at("space")), std::move(cons),
                parse_mode(doc.at("mode").get<std::string>()), params,
                doc.at("seed").get<std::uint64_t>());
  for (const auto& o : doc.at("observations")) opt.tell(observation_from_json(o));
  for (const auto& o : doc.at("partials")) {
    const auto obs = observation_from_json(o);
    std::map<std::size_t, double> values;
    for (std::size_t i = 0; i < obs.constraints.size(); ++i) {
      if (obs.constraints[i]) values[i] = *obs.constraints[i];
    }
    opt.tell_partial(obs.config, values);
  }
  if (doc.at("rng_counter").get<std::size_t>() != opt.observations_.size()) {
    throw std::invalid_argument("rng_counter does not match the observation count");
  }
  return opt;
}

}  // namespace ctpe
