#include "ctpe/search_space.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ctpe {

ParamDomain ParamDomain::numerical(double lower, double upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
    std::ostringstream msg;
    msg << "numerical domain needs finite lower < upper, got [" << lower << ", " << upper << "]";
    throw std::invalid_argument(msg.str());
  }
  ParamDomain d;
  d.kind_ = ParamKind::numerical;
  d.lower_ = lower;
  d.upper_ = upper;
  return d;
}

ParamDomain ParamDomain::categorical(int cardinality) {
  if (cardinality < 2) {
    throw std::invalid_argument("categorical domain needs at least 2 categories, got " +
                                std::to_string(cardinality));
  }
  ParamDomain d;
  d.kind_ = ParamKind::categorical;
  d.lower_ = 0.0;
  d.upper_ = static_cast<double>(cardinality - 1);
  d.cardinality_ = cardinality;
  return d;
}

bool ParamDomain::contains(double value) const {
  if (!std::isfinite(value)) return false;
  if (is_numerical()) return lower_ <= value && value <= upper_;
  return value == std::floor(value) && value >= 0.0 && value < cardinality_;
}

SearchSpace::SearchSpace(std::vector<ParamDomain> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("search space needs at least one dimension");
}

std::vector<Violation> validate(const SearchSpace& space, const Config& config) {
  std::vector<Violation> out;
  if (config.size() != space.size()) {
    out.push_back({config.size() < space.size() ? config.size() : space.size(),
                   "config has " + std::to_string(config.size()) + " entries, space has " +
                       std::to_string(space.size())});
    return out;
  }
  for (std::size_t d = 0; d < space.size(); ++d) {
    if (space[d].contains(config[d])) continue;
    std::ostringstream msg;
    if (space[d].is_numerical()) {
      msg << "value " << config[d] << " outside [" << space[d].lower() << ", " << space[d].upper()
          << "]";
    } else {
      msg << "value " << config[d] << " is not a category index in [0, "
          << space[d].cardinality() << ")";
    }
    out.push_back({d, msg.str()});
  }
  return out;
}

void require_valid(const SearchSpace& space, const Config& config) {
  const auto violations = validate(space, config);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid config:";
  for (const auto& v : violations) msg << " [dim " << v.dim << ": " << v.reason << "]";
  throw std::invalid_argument(msg.str());
}

Config sample_uniform(const SearchSpace& space, RandomStream& rng) {
  Config x(space.size());
  for (std::size_t d = 0; d < space.size(); ++d) {
    const auto& dom = space[d];
    if (dom.is_numerical()) {
      x[d] = dom.lower() + rng.uniform() * dom.range();
    } else {
      x[d] = static_cast<double>(rng.index(static_cast<std::uint64_t>(dom.cardinality())));
    }
  }
  return x;
}

nlohmann::json to_json(const SearchSpace& space) {
  auto doc = nlohmann::json::array();
  for (const auto& dom : space.dims()) {
    if (dom.is_numerical()) {
      doc.push_back({{"kind", "numerical"}, {"lower", dom.lower()}, {"upper", dom.upper()}});
    } else {
      doc.push_back({{"kind", "categorical"}, {"cardinality", dom.cardinality()}});
    }
  }
  return doc;
}

SearchSpace search_space_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw std::invalid_argument("search space document must be a list");
  std::vector<ParamDomain> dims;
  for (const auto& entry : doc) {
    const auto kind = entry.at("kind").get<std::string>();
    if (kind == "numerical") {
      dims.push_back(
          ParamDomain::numerical(entry.at("lower").get<double>(), entry.at("upper").get<double>()));
    } else if (kind == "categorical") {
      dims.push_back(ParamDomain::categorical(entry.at("cardinality").get<int>()));
    } else {
      throw std::invalid_argument("unknown parameter kind '" + kind + "'");
    }
  }
  return SearchSpace(std::move(dims));
}

}  // namespace ctpe
