#include "ctpe/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ctpe/benchmarks.hpp"

namespace ctpe {

namespace {

constexpr std::uint64_t kPartialStream = 0x7061727469616cULL;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string format_p(const std::optional<double>& p) { return p ? format_number(*p) : "n/a"; }

nlohmann::json optional_json(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string setting_id(const std::string& problem, const std::vector<double>& thresholds) {
  std::string id = problem + "|c*=";
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (i) id += ",";
    id += format_number(thresholds[i]);
  }
  return id;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
}

std::optional<double> safe_wilcoxon(const std::vector<double>& d, Alternative alt) {
  try {
    return wilcoxon_signed_rank(d, alt).p_value;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<std::uint64_t> seed_range(std::uint64_t base, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t k = 0; k < count; ++k) seeds[k] = base + k;
  return seeds;
}

nlohmann::json to_json(const LogRecord& rec) {
  nlohmann::json doc;
  doc["method"] = rec.method;
  doc["setting"] = rec.setting;
  doc["seed"] = rec.seed;
  doc["iteration"] = rec.iteration;
  doc["config"] = rec.config;
  doc["f"] = rec.objective;
  doc["c"] = rec.constraints;
  doc["feasible"] = rec.feasible;
  doc["best_feasible"] = optional_json(rec.best_feasible);
  return doc;
}

LogRecord log_record_from_json(const nlohmann::json& doc) {
  LogRecord rec;
  rec.method = doc.at("method").get<std::string>();
  rec.setting = doc.at("setting").get<std::string>();
  rec.seed = doc.at("seed").get<std::uint64_t>();
  rec.iteration = doc.at("iteration").get<int>();
  rec.config = doc.at("config").get<Config>();
  rec.objective = doc.at("f").get<double>();
  rec.constraints = doc.at("c").get<std::vector<double>>();
  rec.feasible = doc.at("feasible").get<bool>();
  if (!doc.at("best_feasible").is_null()) rec.best_feasible = doc.at("best_feasible").get<double>();
  return rec;
}

std::vector<double> resolve_thresholds(const ExperimentConfig& config) {
  const auto problem = make_problem(config.problem);
  const std::size_t c = problem.constraints.size();
  if (!config.thresholds.empty()) {
    if (config.thresholds.size() != c) {
      throw std::invalid_argument("expected " + std::to_string(c) + " thresholds");
    }
    return config.thresholds;
  }
  if (!config.gamma_true.empty()) {
    if (config.gamma_true.size() != c) {
      throw std::invalid_argument("expected " + std::to_string(c) + " gamma_true values");
    }
    std::vector<double> out(c);
    for (std::size_t i = 0; i < c; ++i) {
      out[i] = threshold_for_quantile(problem, i, config.gamma_true[i], config.calibration_samples);
    }
    return out;
  }
  return problem.default_thresholds;
}

RunOutput run_experiment(const ExperimentConfig& config) {
  const auto problem = make_problem(config.problem);
  if (config.methods.empty()) throw std::invalid_argument("at least one method is required");
  if (config.seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (config.budget < config.n_init) throw std::invalid_argument("budget must be at least n_init");
  if (config.n_partial < 0) throw std::invalid_argument("n_partial must be nonnegative");
  const auto thresholds = resolve_thresholds(config);
  std::vector<ConstraintSpec> specs;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    const bool cheap =
        std::find(config.cheap.begin(), config.cheap.end(), i) != config.cheap.end();
    specs.push_back(ConstraintSpec::measurable(thresholds[i], cheap));
  }
  for (std::size_t i : config.cheap) {
    if (i >= specs.size()) throw std::invalid_argument("cheap index out of range");
  }
  const bool augment = config.n_partial > 0 && !config.cheap.empty();

  RunOutput output;
  output.thresholds = thresholds;
  output.oracle = problem.oracle(thresholds);
  output.setting = setting_id(problem.name, thresholds);

  ensure_dir(config.out_dir);
  output.log_path = config.out_dir / "log.jsonl";
  auto log = open_for_write(output.log_path);

  std::vector<std::string> labels;
  for (Mode m : config.methods) labels.push_back(std::string(to_string(m)) + (augment ? "+ka" : ""));

  nlohmann::json header;
  header["format"] = "ctpe-log";
  header["version"] = 1;
  header["problem"] = problem.name;
  header["setting"] = output.setting;
  header["thresholds"] = thresholds;
  header["gamma_true"] = config.gamma_true;
  header["oracle"] = optional_json(output.oracle);
  header["budget"] = config.budget;
  header["methods"] = labels;
  header["seeds"] = config.seeds;
  header["n_partial"] = augment ? config.n_partial : 0;
  header["cheap"] = config.cheap;
  header["n_init"] = config.n_init;
  header["n_samples"] = config.n_samples;
  log << header.dump() << '\n';

  ControlParams params;
  params.n_init = config.n_init;
  params.n_samples = config.n_samples;
  params.n_partial = config.n_partial;

  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    for (std::uint64_t seed : config.seeds) {
      Optimizer opt(problem.space, specs, config.methods[m], params, seed);
      if (augment) {
        auto rng = RandomStream::derive(seed, {kPartialStream});
        for (int k = 0; k < config.n_partial; ++k) {
          const auto x = sample_uniform(problem.space, rng);
          std::map<std::size_t, double> values;
          for (std::size_t i : config.cheap) values[i] = problem.constraints[i](x);
          opt.tell_partial(x, values);
        }
      }

      RunRecord run{labels[m], output.setting, seed, {}, std::nullopt};
      run.trace.reserve(static_cast<std::size_t>(config.budget));
      for (int it = 1; it <= config.budget; ++it) {
        const auto x = opt.ask();
        LogRecord rec;
        rec.method = labels[m];
        rec.setting = output.setting;
        rec.seed = seed;
        rec.iteration = it;
        rec.config = x;
        rec.objective = problem.objective(x);
        for (const auto& c : problem.constraints) rec.constraints.push_back(c(x));
        opt.tell(x, rec.objective, rec.constraints);
        rec.feasible = is_feasible(opt.observations().back(), specs);
        if (auto best = opt.best_feasible()) rec.best_feasible = best->second;
        run.trace.push_back(rec.best_feasible);
        log << to_json(rec).dump() << '\n';
      }
      if (run.trace.back() && output.oracle) {
        run.final_loss = absolute_percentage_loss(*run.trace.back(), *output.oracle);
      }
      output.runs.push_back(std::move(run));
    }
  }
  log.flush();
  if (!log) throw std::runtime_error("failed writing " + output.log_path.string());
  return output;
}

namespace {

struct SettingData {
  std::optional<double> oracle;
  int budget = 0;
  // method -> seed -> trace
  std::map<std::string, std::map<std::uint64_t, std::vector<std::optional<double>>>> traces;
};

}  // namespace

Summary summarize(const std::vector<std::filesystem::path>& logs,
                  const std::filesystem::path& out_dir) {
  if (logs.empty()) throw std::invalid_argument("no logs to summarize");
  std::map<std::string, SettingData> data;
  std::vector<std::string> methods;

  for (const auto& path : logs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument(path.string() + " is empty");
    const auto header = nlohmann::json::parse(line);
    if (header.value("format", "") != "ctpe-log" || header.value("version", 0) != 1) {
      throw std::invalid_argument(path.string() + " is not a version 1 ctpe-log");
    }
    const auto setting = header.at("setting").get<std::string>();
    auto& sd = data[setting];
    const int budget = header.at("budget").get<int>();
    if (sd.budget != 0 && sd.budget != budget) {
      throw std::invalid_argument("setting " + setting + " logged with different budgets");
    }
    sd.budget = budget;
    if (!header.at("oracle").is_null()) sd.oracle = header.at("oracle").get<double>();
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto rec = log_record_from_json(nlohmann::json::parse(line));
      if (rec.setting != setting) throw std::invalid_argument("record setting differs from header");
      if (std::find(methods.begin(), methods.end(), rec.method) == methods.end()) {
        methods.push_back(rec.method);
      }
      auto& trace = sd.traces[rec.method][rec.seed];
      if (rec.iteration != static_cast<int>(trace.size()) + 1) {
        throw std::invalid_argument("non-consecutive iterations in " + path.string());
      }
      trace.push_back(rec.best_feasible);
    }
  }
  if (methods.size() < 2) throw std::invalid_argument("summaries need at least two methods");

  Summary summary;
  summary.methods = methods;
  int budget = 0;
  for (const auto& [setting, sd] : data) {
    summary.settings.push_back(setting);
    if (budget != 0 && sd.budget != budget) throw std::invalid_argument("settings have different budgets");
    budget = sd.budget;
    std::set<std::uint64_t> seeds;
    bool first = true;
    for (const auto& method : methods) {
      const auto it = sd.traces.find(method);
      if (it == sd.traces.end()) {
        throw std::invalid_argument("method " + method + " missing in setting " + setting);
      }
      std::set<std::uint64_t> these;
      for (const auto& [seed, trace] : it->second) {
        if (static_cast<int>(trace.size()) != sd.budget) {
          throw std::invalid_argument("incomplete trajectory for " + method + " in " + setting);
        }
        these.insert(seed);
      }
      if (!first && these != seeds) {
        throw std::invalid_argument("seeds of " + method + " misaligned in " + setting);
      }
      seeds = std::move(these);
      first = false;
    }
  }
  for (int cp : kCheckpoints) {
    if (cp <= budget) summary.checkpoints.push_back(cp);
  }
  if (summary.checkpoints.empty()) summary.checkpoints.push_back(budget);
  const std::size_t n_cp = summary.checkpoints.size();

  // values[setting][method][cp] -> per-seed values in seed order
  std::map<std::string, std::map<std::string, std::vector<std::vector<double>>>> values;
  for (const auto& [setting, sd] : data) {
    for (const auto& method : methods) {
      auto& per_cp = values[setting][method];
      per_cp.assign(n_cp, {});
      for (const auto& [seed, trace] : sd.traces.at(method)) {
        for (std::size_t k = 0; k < n_cp; ++k) {
          const auto& best = trace[static_cast<std::size_t>(summary.checkpoints[k] - 1)];
          double v = kInf;
          if (best) v = sd.oracle ? absolute_percentage_loss(*best, *sd.oracle) : *best;
          per_cp[k].push_back(v);
        }
      }
      auto& med = summary.medians[setting][method];
      for (std::size_t k = 0; k < n_cp; ++k) med.push_back(median(per_cp[k]));
    }
  }

  const std::string& ref = methods.front();
  for (std::size_t m = 1; m < methods.size(); ++m) {
    const auto& other = methods[m];
    for (std::size_t k = 0; k < n_cp; ++k) {
      std::vector<double> a, b, d;
      for (const auto& setting : summary.settings) {
        a.push_back(summary.medians[setting][ref][k]);
        b.push_back(summary.medians[setting][other][k]);
        d.push_back(b.back() - a.back());
      }
      Comparison cmp;
      cmp.reference = ref;
      cmp.other = other;
      cmp.checkpoint = summary.checkpoints[k];
      cmp.wlt = wins_loses_ties(a, b, true);
      cmp.p_other_better = safe_wilcoxon(d, Alternative::less);
      cmp.p_reference_better = safe_wilcoxon(d, Alternative::greater);
      summary.comparisons.push_back(cmp);

      for (const auto& setting : summary.settings) {
        const auto& ra = values[setting][ref][k];
        const auto& rb = values[setting][other][k];
        std::vector<double> ds(ra.size());
        for (std::size_t s = 0; s < ra.size(); ++s) ds[s] = rb[s] - ra[s];
        summary.setting_tests.push_back({setting, other, summary.checkpoints[k],
                                         safe_wilcoxon(ds, Alternative::less),
                                         safe_wilcoxon(ds, Alternative::greater)});
      }
    }
  }

  for (const auto& method : methods) summary.average_ranks[method].assign(n_cp, 0.0);
  for (std::size_t k = 0; k < n_cp; ++k) {
    for (const auto& setting : summary.settings) {
      std::vector<double> meds;
      for (const auto& method : methods) meds.push_back(summary.medians[setting][method][k]);
      const auto ranks = average_rank(meds);
      for (std::size_t m = 0; m < methods.size(); ++m) {
        summary.average_ranks[methods[m]][k] += ranks[m] / static_cast<double>(summary.settings.size());
      }
    }
  }

  ensure_dir(out_dir);
  {
    auto out = open_for_write(out_dir / "medians.tsv");
    out << "setting\tmethod\tcheckpoint\tmedian\n";
    for (const auto& setting : summary.settings) {
      for (const auto& method : methods) {
        for (std::size_t k = 0; k < n_cp; ++k) {
          out << setting << '\t' << method << '\t' << summary.checkpoints[k] << '\t'
              << format_number(summary.medians[setting][method][k]) << '\n';
        }
      }
    }
  }
  {
    auto out = open_for_write(out_dir / "comparison.tsv");
    out << "reference\tother\tcheckpoint\twins\tlosses\tties\tp_other_better\tp_reference_better\n";
    for (const auto& c : summary.comparisons) {
      out << c.reference << '\t' << c.other << '\t' << c.checkpoint << '\t' << c.wlt.wins << '\t'
          << c.wlt.losses << '\t' << c.wlt.ties << '\t' << format_p(c.p_other_better) << '\t'
          << format_p(c.p_reference_better) << '\n';
    }
  }
  {
    auto out = open_for_write(out_dir / "setting_tests.tsv");
    out << "setting\treference\tother\tcheckpoint\tp_other_better\tp_reference_better\n";
    for (const auto& t : summary.setting_tests) {
      out << t.setting << '\t' << ref << '\t' << t.other << '\t' << t.checkpoint << '\t'
          << format_p(t.p_other_better) << '\t' << format_p(t.p_reference_better) << '\n';
    }
  }
  {
    auto out = open_for_write(out_dir / "ranks.tsv");
    out << "method";
    for (int cp : summary.checkpoints) out << '\t' << cp;
    out << '\n';
    for (const auto& method : methods) {
      out << method;
      for (double r : summary.average_ranks[method]) out << '\t' << format_number(r);
      out << '\n';
    }
  }
  {
    nlohmann::json doc;
    doc["format"] = "ctpe-summary";
    doc["version"] = 1;
    doc["checkpoints"] = summary.checkpoints;
    doc["settings"] = summary.settings;
    doc["methods"] = methods;
    auto meds = nlohmann::json::object();
    for (const auto& [setting, by_method] : summary.medians) {
      for (const auto& [method, v] : by_method) {
        auto arr = nlohmann::json::array();
        for (double x : v) arr.push_back(optional_json(x));
        meds[setting][method] = arr;
      }
    }
    doc["medians"] = meds;
    auto cmps = nlohmann::json::array();
    for (const auto& c : summary.comparisons) {
      cmps.push_back({{"reference", c.reference},
                      {"other", c.other},
                      {"checkpoint", c.checkpoint},
                      {"wins", c.wlt.wins},
                      {"losses", c.wlt.losses},
                      {"ties", c.wlt.ties},
                      {"p_other_better", optional_json(c.p_other_better)},
                      {"p_reference_better", optional_json(c.p_reference_better)}});
    }
    doc["comparisons"] = cmps;
    auto tests = nlohmann::json::array();
    for (const auto& t : summary.setting_tests) {
      tests.push_back({{"setting", t.setting},
                       {"other", t.other},
                       {"checkpoint", t.checkpoint},
                       {"p_other_better", optional_json(t.p_other_better)},
                       {"p_reference_better", optional_json(t.p_reference_better)}});
    }
    doc["setting_tests"] = tests;
    doc["average_ranks"] = summary.average_ranks;
    auto out = open_for_write(out_dir / "summary.json");
    out << doc.dump(2) << '\n';
  }
  return summary;
}

}  // namespace ctpe
