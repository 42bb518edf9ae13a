#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "ctpe/split.hpp"

using namespace ctpe;

namespace {

// Full observation with one constraint.
Observation obs1(double f, double c) {
  return {{0.0}, f, {c}, {std::nullopt}};
}

Observation constraint_only(double c) {
  return {{0.0}, std::nullopt, {c}, {std::nullopt}};
}

void check_partition(const SplitResult& s, const std::set<std::size_t>& eligible) {
  std::set<std::size_t> all(s.good.begin(), s.good.end());
  for (auto i : s.bad) CHECK(all.insert(i).second);
  CHECK(all == eligible);
  CHECK(s.gamma_hat == double(s.good.size()) / double(eligible.size()));
}

}  // namespace

TEST_CASE("top count") {
  CHECK(top_count(1) == 1);
  CHECK(top_count(9) == 1);
  CHECK(top_count(16) == 1);
  CHECK(top_count(17) == 2);
  CHECK(top_count(100) == 3);
}

TEST_CASE("feasible-aware objective split walks to the n-th feasible point") {
  // Objectives already in ascending order; flags F,F,F,F,T,T,F,T,T.
  const std::vector<ConstraintSpec> specs = {ConstraintSpec::measurable(1.0)};
  const bool flags[9] = {false, false, false, false, true, true, false, true, true};
  std::vector<Observation> obs;
  for (int n = 0; n < 9; ++n) obs.push_back(obs1(n, flags[n] ? 0.0 : 2.0));
  // Shuffle storage order so the split has to sort.
  std::vector<std::size_t> order = {4, 0, 8, 2, 6, 1, 7, 3, 5};
  std::vector<Observation> shuffled;
  for (auto i : order) shuffled.push_back(obs[i]);

  const auto s = split_objective_feasible(shuffled, specs);
  CHECK(s.good.size() == 5);
  CHECK(s.gamma_hat == doctest::Approx(5.0 / 9.0));
  std::set<std::size_t> good_objectives;
  for (auto i : s.good) good_objectives.insert(static_cast<std::size_t>(*shuffled[i].objective));
  CHECK(good_objectives == std::set<std::size_t>{0, 1, 2, 3, 4});

  const auto v = split_objective_vanilla(shuffled);
  CHECK(v.good.size() == 1);
  CHECK(*shuffled[v.good[0]].objective == 0.0);
}

TEST_CASE("objective split special cases") {
  const std::vector<ConstraintSpec> specs = {ConstraintSpec::measurable(1.0)};
  std::vector<Observation> feasible, infeasible;
  for (int n = 0; n < 9; ++n) {
    feasible.push_back(obs1(9 - n, 0.0));
    infeasible.push_back(obs1(n, 5.0));
  }
  const auto a = split_objective_feasible(feasible, specs);
  const auto b = split_objective_vanilla(feasible);
  CHECK(a.good == b.good);
  CHECK(a.good == std::vector<std::size_t>{8});

  const auto none = split_objective_feasible(infeasible, specs);
  CHECK(none.good.size() == 9);
  CHECK(none.gamma_hat == 1.0);

  const std::vector<Observation> one = {obs1(3.0, 0.0)};
  const auto single = split_objective_vanilla(one);
  CHECK(single.good == std::vector<std::size_t>{0});
  CHECK(single.gamma_hat == 1.0);

  CHECK(split_objective_vanilla(std::vector<Observation>(16, obs1(1, 0))).good.size() == 1);
  CHECK(split_objective_vanilla(std::vector<Observation>(100, obs1(1, 0))).good.size() == 3);

  CHECK_THROWS_AS(split_objective_vanilla(std::vector<Observation>{}), std::invalid_argument);
  const std::vector<Observation> no_objective = {constraint_only(1.0)};
  CHECK_THROWS_AS(split_objective_feasible(no_objective, specs), std::invalid_argument);
}

TEST_CASE("ties in the objective keep insertion order") {
  std::vector<Observation> obs = {obs1(1.0, 0.0), obs1(1.0, 0.0), obs1(1.0, 0.0)};
  CHECK(split_objective_vanilla(obs).good == std::vector<std::size_t>{0});
}

TEST_CASE("hard failures and partials are not eligible for the objective split") {
  const std::vector<ConstraintSpec> specs = {ConstraintSpec::hard()};
  std::vector<Observation> obs = {
      {{0.0}, 1.0, {std::nullopt}, {true}},
      {{0.0}, std::nullopt, {std::nullopt}, {false}},
      {{0.0}, 2.0, {std::nullopt}, {true}},
  };
  const auto s = split_objective_feasible(obs, specs);
  check_partition(s, {0, 2});
  CHECK(s.good == std::vector<std::size_t>{0});
}

TEST_CASE("constraint split") {
  std::vector<Observation> obs;
  for (double c : {3.0, 1.0, 5.0, 2.0, 4.0}) obs.push_back(obs1(0.0, c));

  const auto a = split_constraint(obs, 0, 3.5);
  CHECK(a.good == std::vector<std::size_t>{0, 1, 3});
  CHECK(a.gamma_hat == doctest::Approx(0.6));

  const auto b = split_constraint(obs, 0, 0.5);
  CHECK(b.good == std::vector<std::size_t>{1});
  CHECK(b.gamma_hat == doctest::Approx(0.2));

  std::vector<Observation> three = {obs1(0, 1), obs1(0, 2), obs1(0, 3)};
  CHECK(split_constraint(three, 0, 10.0).gamma_hat == 1.0);

  // Partials count, unmeasured entries do not.
  std::vector<Observation> mixed = {obs1(0, 1), constraint_only(4.0),
                                    {{0.0}, std::nullopt, {std::nullopt}, {false}}};
  check_partition(split_constraint(mixed, 0, 2.0), {0, 1});

  CHECK_THROWS_AS(split_constraint(std::vector<Observation>{}, 0, 1.0), std::invalid_argument);
}

TEST_CASE("naive constraint split may be empty") {
  std::vector<Observation> obs = {obs1(0, 2), obs1(0, 3)};
  const auto s = split_constraint_naive(obs, 0, 1.0);
  CHECK(s.good.empty());
  CHECK(s.gamma_hat == 0.0);
  CHECK(split_constraint_naive(obs, 0, 2.0).good == std::vector<std::size_t>{0});
}

TEST_CASE("hard split") {
  auto hard = [](bool ok) { return Observation{{0.0}, std::nullopt, {std::nullopt}, {ok}}; };
  std::vector<Observation> obs = {hard(true), hard(false), hard(true)};
  const auto s = split_constraint_hard(obs, 0);
  CHECK(s.good == std::vector<std::size_t>{0, 2});
  CHECK(s.gamma_hat == doctest::Approx(2.0 / 3.0));

  std::vector<Observation> fail = {hard(false), hard(false)};
  CHECK(split_constraint_hard(fail, 0).good.empty());
  CHECK(split_constraint_hard(fail, 0).gamma_hat == 0.0);

  std::vector<Observation> ok = {hard(true), hard(true)};
  CHECK(split_constraint_hard(ok, 0).gamma_hat == 1.0);
  CHECK_THROWS_AS(split_constraint_hard(std::vector<Observation>{}, 0), std::invalid_argument);
}

TEST_CASE("is_feasible checks every constraint") {
  const std::vector<ConstraintSpec> specs = {ConstraintSpec::measurable(1.0),
                                             ConstraintSpec::measurable(0.0),
                                             ConstraintSpec::hard()};
  Observation o{{0.0}, 1.0, {1.0, -2.0, std::nullopt}, {std::nullopt, std::nullopt, true}};
  CHECK(is_feasible(o, specs));
  o.constraints[1] = 0.5;
  CHECK_FALSE(is_feasible(o, specs));
  o.constraints[1] = 0.0;
  o.hard_ok[2] = false;
  CHECK_FALSE(is_feasible(o, specs));
}

TEST_CASE("split invariants on random inputs") {
  std::mt19937_64 gen(1234);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<ConstraintSpec> specs = {ConstraintSpec::measurable(0.0)};
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + gen() % 60;
    std::vector<Observation> obs;
    std::set<std::size_t> with_objective, all;
    bool every_feasible = true;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid so ties show up.
      const double c = std::round(u(gen) * 4.0) / 4.0;
      if (gen() % 5 == 0) {
        obs.push_back(constraint_only(c));
      } else {
        obs.push_back(obs1(std::round(u(gen) * 8.0), c));
        with_objective.insert(i);
        every_feasible = every_feasible && c <= 0.0;
      }
      all.insert(i);
    }

    const double t = u(gen);
    const auto sc = split_constraint(obs, 0, t);
    check_partition(sc, all);
    CHECK_FALSE(sc.good.empty());
    std::vector<std::size_t> within;
    for (std::size_t i = 0; i < n; ++i) {
      if (*obs[i].constraints[0] <= t) within.push_back(i);
    }
    if (!within.empty()) CHECK(sc.good == within);

    // Raising the threshold never shrinks the good set.
    const auto wider = split_constraint(obs, 0, t + 0.3);
    CHECK(std::includes(wider.good.begin(), wider.good.end(), sc.good.begin(), sc.good.end()));

    if (!with_objective.empty()) {
      const auto sf = split_objective_feasible(obs, specs);
      const auto sv = split_objective_vanilla(obs);
      check_partition(sf, with_objective);
      check_partition(sv, with_objective);
      CHECK_FALSE(sf.good.empty());
      CHECK(sv.good.size() == top_count(with_objective.size()));
      CHECK(sf.good.size() >= sv.good.size());
      if (every_feasible) CHECK(sf.good == sv.good);
    }
  }
}
