#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "campsched/battery.hpp"
#include "campsched/decode.hpp"
#include "campsched/evolution.hpp"
#include "campsched/instance.hpp"
#include "campsched/local_search.hpp"
#include "campsched/objective.hpp"
#include "campsched/pipeline.hpp"
#include "campsched/precedence.hpp"
#include "campsched/schedule_io.hpp"

namespace py = pybind11;
using namespace campsched;

namespace {

std::vector<int> actions_to_ints(const std::vector<BatteryAction>& row) {
  std::vector<int> out;
  for (BatteryAction a : row) out.push_back(static_cast<int>(a));
  return out;
}

std::vector<std::vector<int>> table_to_ints(const std::vector<std::vector<BatteryAction>>& table) {
  std::vector<std::vector<int>> out;
  for (const auto& row : table) out.push_back(actions_to_ints(row));
  return out;
}

std::vector<std::vector<BatteryAction>> table_from_ints(const std::vector<std::vector<int>>& table) {
  std::vector<std::vector<BatteryAction>> out;
  for (const auto& row : table) {
    auto& r = out.emplace_back();
    for (int v : row) {
      if (v < -1 || v > 1) throw py::value_error("battery actions must be -1, 0 or 1");
      r.push_back(static_cast<BatteryAction>(v));
    }
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_campsched, m) {
  m.doc() = "Campus activity scheduling and battery dispatch against a forecast base load.";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ZeroScaleError>(m, "ZeroScaleError", PyExc_ArithmeticError);

  py::class_<SeriesFrame>(m, "SeriesFrame")
      .def(py::init([](const std::string& start, std::vector<double> values) {
             return SeriesFrame{parse_timestamp(start), kStepMinutes, std::move(values)};
           }),
           py::arg("start"), py::arg("values"))
      .def_property_readonly("start", [](const SeriesFrame& s) { return format_timestamp(s.start); })
      .def_readwrite("values", &SeriesFrame::values)
      .def("__len__", &SeriesFrame::size)
      .def("__eq__", [](const SeriesFrame& a, const SeriesFrame& b) { return a == b; });
  m.def("read_series_csv", py::overload_cast<const std::filesystem::path&>(&read_series_csv), py::arg("path"));
  m.def("write_series_csv", py::overload_cast<const std::filesystem::path&, const SeriesFrame&>(&write_series_csv),
        py::arg("path"), py::arg("series"));

  py::class_<Horizon>(m, "Horizon")
      .def_readonly("n_slots", &Horizon::n_slots)
      .def_readonly("first_weekday", &Horizon::first_weekday)
      .def_readonly("working_start_slot_of_day", &Horizon::working_start_slot_of_day)
      .def_readonly("working_end_slot_of_day", &Horizon::working_end_slot_of_day)
      .def_readonly("slots_per_day", &Horizon::slots_per_day)
      .def_readonly("first_monday_day_index", &Horizon::first_monday_day_index)
      .def_property_readonly("n_days", &Horizon::n_days);

  py::class_<Battery>(m, "Battery")
      .def(py::init([](int id, double capacity_kwh, double max_power_kw, double efficiency) {
             return Battery{id, capacity_kwh, max_power_kw, efficiency};
           }),
           py::arg("id"), py::arg("capacity_kwh"), py::arg("max_power_kw"), py::arg("efficiency"))
      .def_readonly("id", &Battery::id)
      .def_readonly("capacity_kwh", &Battery::capacity_kwh)
      .def_readonly("max_power_kw", &Battery::max_power_kw)
      .def_readonly("efficiency", &Battery::efficiency);

  py::class_<Activity>(m, "Activity")
      .def_readonly("id", &Activity::id)
      .def_property_readonly("recurring", &Activity::is_recurring)
      .def_readonly("power_kw", &Activity::power_kw)
      .def_readonly("duration_slots", &Activity::duration_slots)
      .def_readonly("n_rooms", &Activity::n_rooms)
      .def_readonly("value", &Activity::value)
      .def_readonly("penalty", &Activity::penalty)
      .def_readonly("precedences", &Activity::precedences);

  py::class_<Instance>(m, "Instance")
      .def_readonly("name", &Instance::name)
      .def_readonly("horizon", &Instance::horizon)
      .def_readonly("batteries", &Instance::batteries)
      .def_readonly("activities", &Instance::activities)
      .def_readonly("price", &Instance::price)
      .def_readonly("base_load", &Instance::base_load)
      .def_property_readonly("total_rooms", &Instance::total_rooms)
      .def("__eq__", [](const Instance& a, const Instance& b) { return a == b; });

  m.def("parse_instance", &parse_instance, py::arg("path"));
  m.def("write_instance", &write_instance, py::arg("instance"), py::arg("dir"), py::arg("stem"));
  m.def("with_base_load", &with_base_load, py::arg("instance"), py::arg("base_load"));
  m.def("classify_size", &classify_size, py::arg("instance"));
  m.def(
      "generate_synthetic_instance",
      [](const std::string& size, std::uint64_t seed) {
        if (size != "small" && size != "large") throw py::value_error("size must be 'small' or 'large'");
        return generate_synthetic_instance(size == "large" ? InstanceSize::large : InstanceSize::small, seed);
      },
      py::arg("size"), py::arg("seed"));

  m.def(
      "compute_levels",
      [](const Instance& inst) {
        const PrecedenceInfo info = compute_levels(inst);
        return py::make_tuple(info.level, info.level_after);
      },
      py::arg("instance"), "(level, level_after) lists indexed like instance.activities");
  m.def("allowed_weekdays", &allowed_weekdays, py::arg("level"), py::arg("level_after"));

  py::class_<Problem>(m, "Problem")
      .def(py::init<Instance>(), py::arg("instance"))
      .def_property_readonly("instance", &Problem::instance, py::return_value_policy::reference_internal)
      .def("gene_option_counts", [](const Problem& p) { return gene_option_counts(p); });

  py::class_<CostBreakdown>(m, "CostBreakdown")
      .def_readonly("energy_cost", &CostBreakdown::energy_cost)
      .def_readonly("peak_cost", &CostBreakdown::peak_cost)
      .def_readonly("once_off_reward", &CostBreakdown::once_off_reward)
      .def_readonly("total", &CostBreakdown::total)
      .def_readonly("peak_kw", &CostBreakdown::peak_kw);

  // Schedules cross the boundary as JSON text in the CLI's schedule format.
  py::class_<Schedule>(m, "Schedule")
      .def_static(
          "from_json",
          [](const std::string& text, const Instance& inst) { return schedule_from_json(nlohmann::json::parse(text), inst); },
          py::arg("text"), py::arg("instance"))
      .def("to_json", [](const Schedule& s) { return schedule_to_json(s).dump(); })
      .def_property(
          "battery_actions", [](const Schedule& s) { return table_to_ints(s.battery_actions); },
          [](Schedule& s, const std::vector<std::vector<int>>& t) { s.battery_actions = table_from_ints(t); })
      .def_property_readonly("n_scheduled_once_off",
                             [](const Schedule& s) {
                               return std::count_if(s.once_off.begin(), s.once_off.end(),
                                                    [](const OnceOffAssignment& o) { return o.scheduled; });
                             })
      .def("__eq__", [](const Schedule& a, const Schedule& b) { return a == b; });

  m.def("evaluate_schedule", &evaluate_schedule, py::arg("instance"), py::arg("schedule"));
  m.def("total_load", &total_load, py::arg("instance"), py::arg("schedule"));
  m.def(
      "energy_and_peak_cost",
      [](const std::vector<double>& load, const std::vector<double>& price) {
        if (load.size() != price.size()) throw py::value_error("load and price lengths differ");
        return energy_and_peak_cost(load, price);
      },
      py::arg("load"), py::arg("price"));
  m.def(
      "mase",
      [](const std::vector<double>& forecast, const std::vector<double>& actual, const std::vector<double>& training,
         int season_length) { return mase(forecast, actual, training, season_length); },
      py::arg("forecast"), py::arg("actual"), py::arg("training"), py::arg("season_length"));

  py::class_<EvaluatedIndividual>(m, "EvaluatedIndividual")
      .def_readonly("genome", &EvaluatedIndividual::genome)
      .def_readonly("schedule", &EvaluatedIndividual::schedule)
      .def_readonly("cost", &EvaluatedIndividual::cost);
  m.attr("INFEASIBLE_COST") = kInfeasibleCost;
  m.def(
      "decode_and_repair",
      [](const Problem& p, const std::vector<double>& genome) { return decode_and_repair(p, genome); },
      py::arg("problem"), py::arg("genome"));
  m.def("schedule_violations", &schedule_violations, py::arg("problem"), py::arg("schedule"));

  py::class_<RunTrace>(m, "RunTrace")
      .def_readonly("best_cost_per_generation", &RunTrace::best_cost_per_generation)
      .def_readonly("run_of_generation", &RunTrace::run_of_generation)
      .def_readonly("evaluations", &RunTrace::evaluations)
      .def_readonly("restarts", &RunTrace::restarts);

  py::class_<EvolutionResult>(m, "EvolutionResult")
      .def_readonly("best", &EvolutionResult::best)
      .def_readonly("trace", &EvolutionResult::trace)
      .def_readonly("archive", &EvolutionResult::archive);

  m.def(
      "run_evolution",
      [](const Problem& p, const std::string& algorithm, int population_size, std::uint64_t seed, double time_budget_s,
         long max_evaluations, int max_generations, int max_restarts, int archive_size, int threads) {
        if (algorithm != "cmaes" && algorithm != "ga") throw py::value_error("algorithm must be 'cmaes' or 'ga'");
        EvolutionConfig c;
        c.algorithm = algorithm == "ga" ? Algorithm::ga : Algorithm::cmaes;
        c.population_size = population_size;
        c.seed = seed;
        c.time_budget_s = time_budget_s;
        c.max_evaluations = max_evaluations;
        c.max_generations = max_generations;
        c.max_restarts = max_restarts;
        c.archive_size = archive_size;
        c.threads = threads;
        py::gil_scoped_release release;
        return run_evolution(p, c);
      },
      py::arg("problem"), py::arg("algorithm") = "cmaes", py::arg("population_size") = 100, py::arg("seed") = 0,
      py::arg("time_budget_s") = 60.0, py::arg("max_evaluations") = 0, py::arg("max_generations") = 0,
      py::arg("max_restarts") = -1, py::arg("archive_size") = 10, py::arg("threads") = 0);

  py::class_<ImproveResult>(m, "ImproveResult")
      .def_readonly("schedule", &ImproveResult::schedule)
      .def_readonly("cost", &ImproveResult::cost)
      .def_readonly("evaluations", &ImproveResult::evaluations)
      .def_readonly("moves", &ImproveResult::moves);
  m.def(
      "improve_schedule",
      [](const Problem& p, const Schedule& base, const std::string& variant) {
        if (variant != "keep" && variant != "drop") throw py::value_error("variant must be 'keep' or 'drop'");
        py::gil_scoped_release release;
        return improve_schedule(p, base, variant == "drop" ? ImproveVariant::drop : ImproveVariant::keep);
      },
      py::arg("problem"), py::arg("schedule"), py::arg("variant") = "keep");

  m.def(
      "single_battery_best_response",
      [](const Battery& b, const std::vector<double>& residual, const std::vector<double>& price) {
        return actions_to_ints(single_battery_best_response(b, residual, price));
      },
      py::arg("battery"), py::arg("residual"), py::arg("price"));
  m.def(
      "brute_force_dispatch",
      [](const std::vector<Battery>& batteries, const std::vector<double>& load, const std::vector<double>& price) {
        const DispatchPlan plan = brute_force_dispatch(batteries, load, price);
        return py::make_tuple(table_to_ints(plan.actions), plan.cost);
      },
      py::arg("batteries"), py::arg("load"), py::arg("price"), "(actions, cost) of the exhaustive optimum");
  m.def("with_battery_dispatch", &with_battery_dispatch, py::arg("problem"), py::arg("schedule"));

  m.def(
      "run_pipeline",
      [](const Problem& p, const std::vector<std::string>& algorithms, int population_size, std::uint64_t seed,
         double time_budget_s, long max_evaluations, int top_k, const std::string& variants,
         const std::optional<SeriesFrame>& actual, int threads) {
        PipelineConfig cfg;
        cfg.algorithms.clear();
        for (const auto& a : algorithms) {
          if (a != "cmaes" && a != "ga") throw py::value_error("algorithm must be 'cmaes' or 'ga'");
          cfg.algorithms.push_back(a == "ga" ? Algorithm::ga : Algorithm::cmaes);
        }
        if (variants != "keep" && variants != "drop" && variants != "both") {
          throw py::value_error("variants must be 'keep', 'drop' or 'both'");
        }
        cfg.variants = variants == "keep" ? VariantChoice::keep
                       : variants == "drop" ? VariantChoice::drop
                                            : VariantChoice::both;
        cfg.evolution.population_size = population_size;
        cfg.evolution.seed = seed;
        cfg.evolution.time_budget_s = time_budget_s;
        cfg.evolution.max_evaluations = max_evaluations;
        cfg.top_k = top_k;
        cfg.threads = threads;
        PipelineReport report;
        {
          py::gil_scoped_release release;
          report = run_pipeline(p, cfg, actual);
        }
        return report_to_json(report).dump();
      },
      py::arg("problem"), py::arg("algorithms") = std::vector<std::string>{"cmaes"}, py::arg("population_size") = 100,
      py::arg("seed") = 0, py::arg("time_budget_s") = 60.0, py::arg("max_evaluations") = 0, py::arg("top_k") = 10,
      py::arg("variants") = "both", py::arg("actual") = std::nullopt, py::arg("threads") = 0,
      "Runs the full pipeline and returns the report as JSON text");
}
