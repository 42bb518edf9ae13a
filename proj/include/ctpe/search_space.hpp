#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "ctpe/random.hpp"

namespace ctpe {

// A configuration: one entry per dimension. Categorical entries hold the
// category index as an integral double.
using Config = std::vector<double>;

enum class ParamKind { numerical, categorical };

class ParamDomain {
 public:
  // Throws std::invalid_argument unless lower < upper and both are finite.
  static ParamDomain numerical(double lower, double upper);
  // Throws std::invalid_argument unless cardinality >= 2.
  static ParamDomain categorical(int cardinality);

  ParamKind kind() const { return kind_; }
  bool is_numerical() const { return kind_ == ParamKind::numerical; }
  bool is_categorical() const { return kind_ == ParamKind::categorical; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double range() const { return upper_ - lower_; }
  int cardinality() const { return cardinality_; }

  bool contains(double value) const;

  friend bool operator==(const ParamDomain&, const ParamDomain&) = default;

 private:
  ParamDomain() = default;

  ParamKind kind_ = ParamKind::numerical;
  double lower_ = 0.0;
  double upper_ = 1.0;
  int cardinality_ = 0;
};

struct Violation {
  std::size_t dim;
  std::string reason;
};

class SearchSpace {
 public:
  explicit SearchSpace(std::vector<ParamDomain> dims);

  std::size_t size() const { return dims_.size(); }
  const ParamDomain& operator[](std::size_t d) const { return dims_[d]; }
  const std::vector<ParamDomain>& dims() const { return dims_; }

  friend bool operator==(const SearchSpace&, const SearchSpace&) = default;

 private:
  std::vector<ParamDomain> dims_;
};

// Empty result means the config is valid.
std::vector<Violation> validate(const SearchSpace& space, const Config& config);

// Throws std::invalid_argument listing the violations, if any.
void require_valid(const SearchSpace& space, const Config& config);

// One uniform draw per dimension.
Config sample_uniform(const SearchSpace& space, RandomStream& rng);

nlohmann::json to_json(const SearchSpace& space);
SearchSpace search_space_from_json(const nlohmann::json& doc);

}  // namespace ctpe
