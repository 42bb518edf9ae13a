#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "ctpe/benchmarks.hpp"
#include "ctpe/optimizer.hpp"

using namespace ctpe;

namespace {

const SearchSpace kSquare({ParamDomain::numerical(-5.0, 5.0), ParamDomain::numerical(-5.0, 5.0)});

void evaluate_overlap(Optimizer& opt, const Config& x) {
  const auto v = quad_overlap(x[0], x[1], 2.3);
  opt.tell(x, v.objective, {v.constraint});
}

std::size_t argmax_component(const AskResult& r, std::size_t component, bool drop_first_term) {
  std::size_t best = r.pool.size();
  double best_score = -INFINITY;
  for (std::size_t k = 0; k < r.pool.size(); ++k) {
    const auto& c = r.pool[k];
    if (c.source_component != component) continue;
    const double s = drop_first_term ? c.total_log_score - c.log_relative_ratios[0]
                                     : c.total_log_score;
    if (best == r.pool.size() || s > best_score) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("constructor validation") {
  const std::vector<ConstraintSpec> one = {ConstraintSpec::measurable(3.0)};
  ControlParams bad;
  bad.n_samples = -1;
  CHECK_THROWS_AS(Optimizer(kSquare, one, Mode::ctpe, bad, 0), std::invalid_argument);
  bad = ControlParams{};
  bad.n_init = 0;
  CHECK_THROWS_AS(Optimizer(kSquare, one, Mode::ctpe, bad, 0), std::invalid_argument);
  const std::vector<ConstraintSpec> nan_threshold = {ConstraintSpec::measurable(NAN)};
  CHECK_THROWS_AS(Optimizer(kSquare, nan_threshold, Mode::ctpe, {}, 0), std::invalid_argument);
  const std::vector<ConstraintSpec> cheap_hard = {{0.0, true, ConstraintKind::hard}};
  CHECK_THROWS_AS(Optimizer(kSquare, cheap_hard, Mode::ctpe, {}, 0), std::invalid_argument);
  CHECK_THROWS_AS(parse_mode("tpe"), std::invalid_argument);
  for (Mode m : {Mode::ctpe, Mode::naive, Mode::vanilla_tpe, Mode::random}) {
    CHECK(parse_mode(to_string(m)) == m);
  }
}

TEST_CASE("same seed gives the same ask sequence") {
  const std::vector<ConstraintSpec> specs = {ConstraintSpec::measurable(3.0)};
  Optimizer a(kSquare, specs, Mode::ctpe, {}, 42), b(kSquare, specs, Mode::ctpe, {}, 42);
  Optimizer c(kSquare, specs, Mode::ctpe, {}, 43);
  bool differs = false;
  for (int i = 0; i < 30; ++i) {
    const auto x = a.ask();
    CHECK(x == a.ask());
    CHECK(x == b.ask());
    differs = differs || x != c.ask();
    evaluate_overlap(a, x);
    evaluate_overlap(b, x);
    evaluate_overlap(c, c.ask());
  }
  CHECK(differs);
}

TEST_CASE("initial phase samples uniformly and the pool has N_s per component") {
  const std::vector<ConstraintSpec> specs = {ConstraintSpec::measurable(3.0)};
  Optimizer opt(kSquare, specs, Mode::ctpe, {}, 1);
  for (int i = 0; i < 3; ++i) evaluate_overlap(opt, opt.ask());
  CHECK(opt.ask_detailed().random_draw);
  for (int i = 0; i < 7; ++i) evaluate_overlap(opt, opt.ask());
  const auto r = opt.ask_detailed();
  CHECK_FALSE(r.random_draw);
  CHECK(r.pool.size() == 48);
  CHECK(r.components.size() == 2);
  CHECK(validate(kSquare, r.config).empty());
  for (const auto& c : r.pool) {
    double s = 0.0;
    for (double v : c.log_relative_ratios) s += v;
    CHECK(std::abs(c.total_log_score - s) < 1e-10);
  }
}

TEST_CASE("ctpe without constraints behaves like vanilla TPE") {
  Optimizer a(kSquare, {}, Mode::ctpe, {}, 5), b(kSquare, {}, Mode::vanilla_tpe, {}, 5);
  CHECK(a.component_count() == 1);
  for (int i = 0; i < 40; ++i) {
    const auto x = a.ask();
    REQUIRE(x == b.ask());
    const auto v = quad_overlap(x[0], x[1], 2.3);
    a.tell(x, v.objective, {});
    b.tell(x, v.objective, {});
  }
}

TEST_CASE("loose thresholds: ctpe and vanilla pick the same objective candidate") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::vector<ConstraintSpec> specs = {ConstraintSpec::measurable(1e6)};
    Optimizer c(kSquare, specs, Mode::ctpe, {}, seed), v(kSquare, specs, Mode::vanilla_tpe, {}, seed);
    for (int it = 0; it < 100; ++it) {
      const auto rc = c.ask_detailed();
      const auto rv = v.ask_detailed();
      if (rc.random_draw) {
        REQUIRE(rv.random_draw);
        REQUIRE(rc.config == rv.config);
      } else {
        REQUIRE(rc.components[1].gamma_hat == 1.0);
        const std::size_t k = argmax_component(rc, 0, false);
        REQUIRE(rc.pool[k].config == rv.pool[rv.selected].config);
        REQUIRE(rc.pool[k].sample_index == rv.selected);
      }
      evaluate_overlap(c, rc.config);
      evaluate_overlap(v, rc.config);
    }
  }
}

TEST_CASE("all hard failures leave the hard component at the prior") {
  const std::vector<ConstraintSpec> specs = {ConstraintSpec::measurable(3.0), ConstraintSpec::hard()};
  Optimizer opt(kSquare, specs, Mode::ctpe, {}, 3);
  for (int i = 0; i < 15; ++i) {
    const auto x = opt.ask();
    const auto v = quad_overlap(x[0], x[1], 2.3);
    Observation o{x, std::nullopt, {v.constraint, std::nullopt}, {std::nullopt, false}};
    opt.tell(o);
  }
  CHECK_FALSE(opt.best_feasible());
  const auto r = opt.ask_detailed();
  REQUIRE(r.components.size() == 3);
  CHECK(r.components[2].gamma_hat == 0.0);
  CHECK(validate(kSquare, r.config).empty());
  const auto prior = Kde::prior(kSquare);
  RandomStream rng(8);
  for (int i = 0; i < 500; ++i) {
    const auto x = sample_uniform(kSquare, rng);
    CHECK(std::abs(r.components[2].good.pdf(x) - prior.pdf(x)) <= 1e-12);
  }
}

TEST_CASE("with nothing feasible the objective term does not steer selection") {
  const std::vector<ConstraintSpec> specs = {ConstraintSpec::measurable(-1.0)};
  Optimizer opt(kSquare, specs, Mode::ctpe, {}, 4);
  for (int it = 0; it < 40; ++it) {
    const auto r = opt.ask_detailed();
    if (!r.random_draw) {
      CHECK(r.components[0].gamma_hat == 1.0);
      std::size_t best = 0;
      for (std::size_t k = 1; k < r.pool.size(); ++k) {
        const auto& a = r.pool[k];
        const auto& b = r.pool[best];
        if (a.total_log_score - a.log_relative_ratios[0] > b.total_log_score - b.log_relative_ratios[0]) {
          best = k;
        }
      }
      CHECK(best == r.selected);
    }
    evaluate_overlap(opt, r.config);
  }
}

TEST_CASE("knowledge augmentation wiring") {
  const auto problem = make_problem("quad_overlap");
  auto run = [&](bool cheap, int n_partial, int iterations) {
    const std::vector<ConstraintSpec> specs = {ConstraintSpec::measurable(3.0, cheap)};
    Optimizer opt(kSquare, specs, Mode::ctpe, {}, 9);
    RandomStream prng(123);
    for (int i = 0; i < n_partial; ++i) {
      const auto x = sample_uniform(kSquare, prng);
      opt.tell_partial(x, {{0, problem.constraints[0](x)}});
    }
    std::vector<Config> trace;
    for (int i = 0; i < iterations; ++i) {
      const auto x = opt.ask();
      trace.push_back(x);
      evaluate_overlap(opt, x);
    }
    return std::pair(trace, opt.ask_detailed());
  };

  const auto [trace_aug, detail] = run(true, 200, 15);
  CHECK(detail.eligible_counts[0] == 15);
  CHECK(detail.eligible_counts[1] == 215);

  const auto plain = run(false, 0, 40).first;
  const auto empty_aug = run(true, 0, 40).first;
  CHECK(plain == empty_aug);
}

TEST_CASE("augmented view") {
  const std::vector<ConstraintSpec> specs = {ConstraintSpec::measurable(3.0, true),
                                             ConstraintSpec::measurable(1.0)};
  Optimizer opt(kSquare, specs, Mode::ctpe, {}, 0);
  opt.tell({0.0, 0.0}, 1.0, {0.5, 0.5});
  opt.tell_partial({1.0, 1.0}, {{0, 2.0}});
  CHECK(opt.augmented_view(0).size() == 1);
  CHECK(opt.augmented_view(1).size() == 2);
  CHECK(opt.augmented_view(2).size() == 1);
  CHECK_THROWS_AS(opt.augmented_view(3), std::out_of_range);
  CHECK_THROWS_AS(opt.tell_partial({1.0, 1.0}, {{1, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(opt.tell_partial({1.0, 1.0}, {}), std::invalid_argument);
  CHECK(opt.cheap_indices() == std::vector<std::size_t>{0});
}

TEST_CASE("tell validation and best feasible") {
  const std::vector<ConstraintSpec> specs = {ConstraintSpec::measurable(1.0),
                                             ConstraintSpec::measurable(2.0)};
  Optimizer opt(kSquare, specs, Mode::ctpe, {}, 0);
  CHECK_FALSE(opt.best_feasible());
  CHECK_THROWS_AS(opt.tell({0.0, 0.0}, 1.0, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(opt.tell({9.0, 0.0}, 1.0, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(opt.tell({0.0, 0.0}, NAN, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(opt.tell(Observation{{0.0, 0.0}, std::nullopt, {0.0, 0.0}, {}}),
                  std::invalid_argument);
  CHECK(opt.observations().empty());

  opt.tell({0.0, 0.0}, 3.0, {0.0, 0.0});
  opt.tell({1.0, 0.0}, 0.5, {0.0, 2.5});  // infeasible on the second threshold
  opt.tell({2.0, 0.0}, 1.5, {1.0, 2.0});
  CHECK(opt.observations().size() == 3);
  REQUIRE(opt.best_feasible());
  CHECK(opt.best_feasible()->second == 1.5);
  CHECK(opt.best_feasible()->first == Config{2.0, 0.0});
}

TEST_CASE("hard failures are stored but ignored by the objective split") {
  const std::vector<ConstraintSpec> specs = {ConstraintSpec::hard()};
  ControlParams p;
  p.n_init = 2;
  Optimizer opt(kSquare, specs, Mode::ctpe, p, 0);
  opt.tell(Observation{{0.0, 0.0}, 1.0, {std::nullopt}, {true}});
  opt.tell(Observation{{1.0, 0.0}, std::nullopt, {std::nullopt}, {false}});
  opt.tell(Observation{{2.0, 0.0}, 2.0, {std::nullopt}, {true}});
  CHECK_THROWS_AS(opt.tell(Observation{{0.0, 0.0}, 1.0, {0.5}, {}}), std::invalid_argument);
  const auto r = opt.ask_detailed();
  CHECK(r.eligible_counts[0] == 2);
  CHECK(r.eligible_counts[1] == 3);
}

TEST_CASE("state export and import resume the same trajectory") {
  const std::vector<ConstraintSpec> specs = {ConstraintSpec::measurable(3.0, true)};
  Optimizer a(kSquare, specs, Mode::ctpe, {}, 11);
  a.tell_partial({1.0, 1.0}, {{0, 2.5}});
  for (int i = 0; i < 20; ++i) evaluate_overlap(a, a.ask());
  const auto doc = a.export_state();
  CHECK(doc["rng_counter"] == 20);
  auto b = Optimizer::import_state(nlohmann::json::parse(doc.dump()));
  CHECK(b.observations() == a.observations());
  CHECK(b.partials() == a.partials());
  for (int i = 0; i < 10; ++i) {
    const auto x = a.ask();
    REQUIRE(x == b.ask());
    evaluate_overlap(a, x);
    evaluate_overlap(b, x);
  }
  auto broken = doc;
  broken["rng_counter"] = 3;
  CHECK_THROWS_AS(Optimizer::import_state(broken), std::invalid_argument);
}

TEST_CASE("every mode keeps producing valid configs") {
  const std::vector<ConstraintSpec> specs = {ConstraintSpec::measurable(3.0)};
  for (Mode m : {Mode::ctpe, Mode::naive, Mode::vanilla_tpe, Mode::random}) {
    Optimizer opt(kSquare, specs, m, {}, 2);
    for (int i = 0; i < 30; ++i) {
      const auto x = opt.ask();
      REQUIRE(validate(kSquare, x).empty());
      evaluate_overlap(opt, x);
    }
  }
}
