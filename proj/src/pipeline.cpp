#include "campsched/pipeline.hpp"

#include <algorithm>
#include <numeric>

#include "campsched/battery.hpp"
#include "campsched/schedule_io.hpp"
#include "parallel.hpp"

namespace campsched {

Schedule with_battery_dispatch(const Problem& problem, const Schedule& schedule) {
  const Instance& inst = problem.instance();
  Schedule s = schedule;
  s.battery_actions.clear();
  const DispatchPlan plan = optimize_dispatch(inst, total_load_series(inst, s));
  if (!inst.batteries.empty()) s.battery_actions = plan.actions;
  return s;
}

namespace {

struct Candidate {
  Schedule schedule;
  double cost = 0.0;
};

// Stable sort by cost and drop repeated schedules.
void sort_unique(std::vector<Candidate>& items) {
  std::stable_sort(items.begin(), items.end(), [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
  std::vector<Candidate> out;
  for (auto& c : items) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Candidate& o) { return o.schedule == c.schedule; });
    if (!seen) out.push_back(std::move(c));
  }
  items = std::move(out);
}

template <class Fn>
auto in_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace

PipelineReport run_pipeline(const Problem& problem, const PipelineConfig& config,
                            const std::optional<SeriesFrame>& actual_load) {
  const Instance& inst = problem.instance();
  if (config.algorithms.empty()) throw StageError("evolve", "no algorithm selected");
  if (config.top_k < 1) throw StageError("improve", "top_k must be >= 1");
  std::optional<Instance> actual_instance;
  if (actual_load) {
    if (actual_load->size() != inst.base_load.size()) {
      throw ValidationError("actual load has " + std::to_string(actual_load->size()) + " values, expected " +
                            std::to_string(inst.base_load.size()));
    }
    actual_instance = with_base_load(inst, *actual_load);
  }

  PipelineReport report;
  report.instance_name = inst.name;

  std::vector<Candidate> pool = in_stage("evolve", [&] {
    std::vector<Candidate> found;
    for (Algorithm algo : config.algorithms) {
      EvolutionConfig cfg = config.evolution;
      cfg.algorithm = algo;
      cfg.archive_size = std::max(cfg.archive_size, config.top_k);
      if (cfg.threads == 0) cfg.threads = config.threads;
      EvolutionResult res = run_evolution(problem, cfg);
      report.evaluations += res.trace.evaluations;
      report.traces.push_back(std::move(res.trace));
      for (auto& ind : res.archive) found.push_back({std::move(*ind.schedule), ind.cost});
    }
    sort_unique(found);
    if (found.empty()) throw StageError("evolve", "no feasible base schedule found");
    if (static_cast<int>(found.size()) > config.top_k) found.resize(config.top_k);
    return found;
  });

  std::vector<ImproveVariant> variants;
  if (config.variants != VariantChoice::drop) variants.push_back(ImproveVariant::keep);
  if (config.variants != VariantChoice::keep) variants.push_back(ImproveVariant::drop);

  std::vector<Candidate> improved = in_stage("improve", [&] {
    const std::size_t jobs = pool.size() * variants.size();
    std::vector<ImproveResult> results(jobs);
    detail::parallel_for(jobs, config.threads, [&](std::size_t j) {
      results[j] = improve_schedule(problem, pool[j / variants.size()].schedule, variants[j % variants.size()]);
    });
    std::vector<Candidate> out;
    for (auto& r : results) {
      report.evaluations += r.evaluations;
      out.push_back({std::move(r.schedule), r.cost});
    }
    sort_unique(out);
    return out;
  });

  Candidate final = in_stage("battery", [&] {
    Candidate best{improved.front().schedule, improved.front().cost};
    const std::size_t n = std::min<std::size_t>(improved.size(), std::max(1, config.battery_candidates));
    for (std::size_t i = 0; i < n; ++i) {
      Schedule s = with_battery_dispatch(problem, improved[i].schedule);
      const double cost = evaluate_schedule(inst, s).total;
      if (i == 0 || cost < best.cost) best = {std::move(s), cost};
    }
    return best;
  });

  in_stage("evaluate", [&] {
    const auto outcome = [&](Schedule s) {
      StageOutcome o;
      o.forecast_cost = evaluate_schedule(inst, s);
      if (actual_instance) o.actual_cost = evaluate_schedule(*actual_instance, s);
      o.schedule = std::move(s);
      return o;
    };
    report.base = outcome(std::move(pool.front().schedule));
    report.improved = outcome(std::move(improved.front().schedule));
    report.final = outcome(std::move(final.schedule));
    return 0;
  });
  return report;
}

nlohmann::json report_to_json(const PipelineReport& r) {
  using nlohmann::json;
  json doc;
  doc["instance"] = r.instance_name;
  doc["base_cost"] = r.base.forecast_cost.total;
  doc["improved_cost"] = r.improved.forecast_cost.total;
  doc["final_cost"] = r.final.forecast_cost.total;
  if (r.final.actual_cost) {
    doc["actual_base_cost"] = r.base.actual_cost->total;
    doc["actual_improved_cost"] = r.improved.actual_cost->total;
    doc["actual_final_cost"] = r.final.actual_cost->total;
  }
  json stages;
  const auto stage = [](const StageOutcome& o) {
    json s;
    s["forecast"] = cost_to_json(o.forecast_cost);
    if (o.actual_cost) s["actual"] = cost_to_json(*o.actual_cost);
    return s;
  };
  stages["base"] = stage(r.base);
  stages["improved"] = stage(r.improved);
  stages["final"] = stage(r.final);
  doc["stages"] = std::move(stages);
  doc["evolution"] = json::array();
  for (const auto& t : r.traces) {
    doc["evolution"].push_back({{"generations", t.best_cost_per_generation.size()},
                                {"restarts", t.restarts},
                                {"evaluations", t.evaluations},
                                {"best_cost", t.best_cost_per_generation.empty()
                                                  ? json(nullptr)
                                                  : json(*std::min_element(t.best_cost_per_generation.begin(),
                                                                           t.best_cost_per_generation.end()))}});
  }
  doc["evaluations"] = r.evaluations;
  return doc;
}

}  // namespace campsched
