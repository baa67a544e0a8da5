// campsched: generate instances, evolve, improve, dispatch batteries and evaluate schedules.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "campsched/battery.hpp"
#include "campsched/evolution.hpp"
#include "campsched/instance.hpp"
#include "campsched/local_search.hpp"
#include "campsched/objective.hpp"
#include "campsched/pipeline.hpp"
#include "campsched/schedule_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace campsched;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitStage = 3;

struct Options {
  std::string instance;
  std::string forecast;
  std::string actual;
  std::string schedule;
  std::string out = ".";
  std::string algo = "cmaes";
  std::string variant = "both";
  std::string size = "small";
  std::string name;
  int pop = 100;
  std::uint64_t seed = 0;
  double time_budget_s = 60.0;
  long max_evals = 0;
  int max_generations = 0;
  int max_restarts = -1;
  int top_k = 10;
  int threads = 0;
};

Instance load_instance(const Options& o) {
  Instance inst = parse_instance(o.instance);
  if (!o.forecast.empty()) inst = with_base_load(std::move(inst), read_series_csv(fs::path(o.forecast)));
  return inst;
}

std::optional<SeriesFrame> load_actual(const Options& o) {
  if (o.actual.empty()) return std::nullopt;
  return read_series_csv(fs::path(o.actual));
}

EvolutionConfig evolution_config(const Options& o) {
  EvolutionConfig c;
  c.population_size = o.pop;
  c.seed = o.seed;
  c.time_budget_s = o.time_budget_s;
  c.max_evaluations = o.max_evals;
  c.max_generations = o.max_generations;
  c.max_restarts = o.max_restarts;
  c.threads = o.threads;
  c.archive_size = o.top_k;
  return c;
}

fs::path out_dir(const Options& o) {
  fs::create_directories(o.out);
  return o.out;
}

json evaluation_json(const Instance& inst, const Schedule& s, const std::optional<SeriesFrame>& actual) {
  json doc;
  doc["forecast"] = cost_to_json(evaluate_schedule(inst, s));
  if (actual) doc["actual"] = cost_to_json(evaluate_schedule(with_base_load(inst, *actual), s));
  return doc;
}

int cmd_gen_instance(const Options& o) {
  const InstanceSize size = o.size == "large" ? InstanceSize::large : InstanceSize::small;
  Instance inst = generate_synthetic_instance(size, o.seed);
  const std::string stem = o.name.empty() ? o.size + "_" + std::to_string(o.seed) : o.name;
  inst.name = stem;
  std::cout << write_instance(inst, out_dir(o), stem).string() << '\n';
  return 0;
}

int cmd_evolve(const Options& o) {
  const Problem problem(load_instance(o));
  EvolutionConfig cfg = evolution_config(o);
  cfg.algorithm = o.algo == "ga" ? Algorithm::ga : Algorithm::cmaes;
  const EvolutionResult res = run_evolution(problem, cfg);
  if (!res.best.schedule) throw StageError("evolve", "no feasible base schedule found");
  const fs::path dir = out_dir(o);
  write_schedule(dir / "base_schedule.json", *res.best.schedule);
  write_trace_csv(dir / ("trace_" + o.algo + ".csv"), res.trace);
  json report = {{"base_cost", res.best.cost},
                 {"generations", res.trace.best_cost_per_generation.size()},
                 {"restarts", res.trace.restarts},
                 {"evaluations", res.trace.evaluations},
                 {"archive_costs", json::array()}};
  for (const auto& a : res.archive) report["archive_costs"].push_back(a.cost);
  write_json(dir / "evolve_report.json", report);
  std::cout << "base cost " << format_double(res.best.cost) << '\n';
  return 0;
}

int cmd_improve(const Options& o) {
  const Problem problem(load_instance(o));
  const Schedule base = read_schedule(o.schedule, problem.instance());
  if (const auto v = schedule_violations(problem, base); !v.empty()) throw ValidationError("schedule: " + v.front());
  std::optional<ImproveResult> best;
  for (auto variant : {ImproveVariant::keep, ImproveVariant::drop}) {
    if ((variant == ImproveVariant::keep && o.variant == "drop") || (variant == ImproveVariant::drop && o.variant == "keep")) {
      continue;
    }
    auto r = improve_schedule(problem, base, variant, o.threads);
    if (!best || r.cost < best->cost) best = std::move(r);
  }
  const fs::path dir = out_dir(o);
  write_schedule(dir / "improved_schedule.json", best->schedule);
  write_json(dir / "improve_report.json", {{"base_cost", evaluate_schedule(problem.instance(), base).total},
                                           {"improved_cost", best->cost},
                                           {"moves", best->moves},
                                           {"evaluations", best->evaluations}});
  std::cout << "improved cost " << format_double(best->cost) << '\n';
  return 0;
}

int cmd_battery(const Options& o) {
  const Problem problem(load_instance(o));
  const Schedule s = read_schedule(o.schedule, problem.instance());
  if (const auto v = schedule_violations(problem, s); !v.empty()) throw ValidationError("schedule: " + v.front());
  const Schedule dispatched = with_battery_dispatch(problem, s);
  Schedule no_battery = s;
  no_battery.battery_actions.clear();
  const double before = evaluate_schedule(problem.instance(), no_battery).total;
  const double after = evaluate_schedule(problem.instance(), dispatched).total;
  const fs::path dir = out_dir(o);
  write_schedule(dir / "final_schedule.json", dispatched);
  write_json(dir / "battery_report.json", {{"improved_cost", before}, {"final_cost", after}});
  std::cout << "final cost " << format_double(after) << '\n';
  return 0;
}

int cmd_evaluate(const Options& o) {
  const Instance inst = load_instance(o);
  const Problem problem(inst);
  const Schedule s = read_schedule(o.schedule, inst);
  json doc = evaluation_json(inst, s, load_actual(o));
  doc["violations"] = schedule_violations(problem, s);
  if (o.out == ".") {
    std::cout << doc.dump(2) << '\n';
  } else {
    if (fs::path(o.out).has_parent_path()) fs::create_directories(fs::path(o.out).parent_path());
    write_json(o.out, doc);
  }
  return 0;
}

int cmd_pipeline(const Options& o) {
  const Problem problem(load_instance(o));
  PipelineConfig cfg;
  cfg.evolution = evolution_config(o);
  cfg.top_k = o.top_k;
  cfg.threads = o.threads;
  if (o.algo == "both") {
    cfg.algorithms = {Algorithm::cmaes, Algorithm::ga};
  } else {
    cfg.algorithms = {o.algo == "ga" ? Algorithm::ga : Algorithm::cmaes};
  }
  cfg.variants = o.variant == "keep" ? VariantChoice::keep : o.variant == "drop" ? VariantChoice::drop : VariantChoice::both;
  const PipelineReport report = run_pipeline(problem, cfg, load_actual(o));
  const fs::path dir = out_dir(o);
  write_schedule(dir / "base_schedule.json", report.base.schedule);
  write_schedule(dir / "improved_schedule.json", report.improved.schedule);
  write_schedule(dir / "final_schedule.json", report.final.schedule);
  for (std::size_t i = 0; i < report.traces.size(); ++i) {
    const char* algo = cfg.algorithms[i] == Algorithm::ga ? "ga" : "cmaes";
    write_trace_csv(dir / ("trace_" + std::string(algo) + ".csv"), report.traces[i]);
  }
  write_json(dir / "report.json", report_to_json(report));
  std::cout << "base " << format_double(report.base.forecast_cost.total) << " improved "
            << format_double(report.improved.forecast_cost.total) << " final "
            << format_double(report.final.forecast_cost.total) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Campus activity and battery scheduling"};
  app.require_subcommand(1);
  Options o;

  const auto add_instance = [&](CLI::App* cmd) {
    cmd->add_option("--instance", o.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--forecast", o.forecast, "Base-load CSV replacing the instance's")->check(CLI::ExistingFile);
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  };
  const auto add_search = [&](CLI::App* cmd, bool allow_both) {
    std::vector<std::string> algos{"cmaes", "ga"};
    if (allow_both) algos.push_back("both");
    cmd->add_option("--algo", o.algo, "Search algorithm")->check(CLI::IsMember(algos));
    cmd->add_option("--pop", o.pop, "Population size")->check(CLI::Range(4, 100000));
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--time-budget-s", o.time_budget_s, "Wall-clock budget per algorithm (<= 0 disables)");
    cmd->add_option("--max-evals", o.max_evals, "Evaluation budget per algorithm (0 = none)");
    cmd->add_option("--max-generations", o.max_generations, "Generations per run (0 = until converged)");
    cmd->add_option("--max-restarts", o.max_restarts, "Restarts after the first run (-1 = until a budget expires)");
    cmd->add_option("--top-k", o.top_k, "Distinct base schedules kept")->check(CLI::Range(1, 1000));
  };
  const auto add_variant = [&](CLI::App* cmd) {
    cmd->add_option("--variant", o.variant, "Improvement variant")->check(CLI::IsMember({"keep", "drop", "both"}));
  };

  auto* gen = app.add_subcommand("gen-instance", "Write a synthetic instance");
  gen->add_option("--size", o.size, "small or large")->check(CLI::IsMember({"small", "large"}));
  gen->add_option("--seed", o.seed, "Random seed");
  gen->add_option("--name", o.name, "File stem (default <size>_<seed>)");
  gen->add_option("--out", o.out, "Output directory");

  auto* evolve = app.add_subcommand("evolve", "Search for a base schedule");
  add_instance(evolve);
  add_search(evolve, false);
  evolve->add_option("--out", o.out, "Output directory");

  auto* improve = app.add_subcommand("improve", "Local search on a schedule");
  add_instance(improve);
  add_variant(improve);
  improve->add_option("--schedule", o.schedule, "Schedule JSON")->required()->check(CLI::ExistingFile);
  improve->add_option("--out", o.out, "Output directory");

  auto* battery = app.add_subcommand("battery", "Dispatch batteries for a schedule");
  add_instance(battery);
  battery->add_option("--schedule", o.schedule, "Schedule JSON")->required()->check(CLI::ExistingFile);
  battery->add_option("--out", o.out, "Output directory");

  auto* evaluate = app.add_subcommand("evaluate", "Cost breakdown of a schedule");
  add_instance(evaluate);
  evaluate->add_option("--schedule", o.schedule, "Schedule JSON")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--actual", o.actual, "Actual base-load CSV")->check(CLI::ExistingFile);
  evaluate->add_option("--out", o.out, "Report file (default stdout)");

  auto* pipeline = app.add_subcommand("pipeline", "Evolve, improve, dispatch and evaluate");
  add_instance(pipeline);
  add_search(pipeline, true);
  add_variant(pipeline);
  pipeline->add_option("--actual", o.actual, "Actual base-load CSV")->check(CLI::ExistingFile);
  pipeline->add_option("--out", o.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*gen) return cmd_gen_instance(o);
    if (*evolve) return cmd_evolve(o);
    if (*improve) return cmd_improve(o);
    if (*battery) return cmd_battery(o);
    if (*evaluate) return cmd_evaluate(o);
    if (*pipeline) return cmd_pipeline(o);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  }
  return 0;
}
