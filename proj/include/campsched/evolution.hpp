#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "campsched/decode.hpp"
#include "campsched/problem.hpp"

namespace campsched {

enum class Algorithm { cmaes, ga };

struct EvolutionConfig {
  Algorithm algorithm = Algorithm::cmaes;
  int population_size = 100;
  double sigma0 = 0.5;        // CMA-ES initial step size in normalised gene units
  double f_tol = 100.0;       // CMA-ES: stop when recent generation bests span less than this
  double x_tol = 1.0;         // CMA-ES: stop when every coordinate's std dev (option units) is below this
  double ga_parent_fraction = 0.10;
  int ga_stall_generations = 500;
  double ga_stall_epsilon = 1.0;
  std::optional<double> ga_mutation_rate;  // per gene; default 1 / genome length
  std::uint64_t seed = 0;
  double time_budget_s = 60.0;  // <= 0 disables the wall-clock budget
  long max_evaluations = 0;     // 0 = unlimited; checked between generations
  int max_generations = 0;      // per run, 0 = unlimited
  int max_restarts = -1;        // -1 = restart until a budget expires
  int threads = 0;              // 0 = hardware concurrency
  int archive_size = 10;        // distinct feasible schedules kept for later stages
};

/// Throws std::invalid_argument on out-of-range settings.
void validate_config(const EvolutionConfig& config);

struct RunTrace {
  std::vector<double> best_cost_per_generation;  // best so far within the current run
  std::vector<int> run_of_generation;            // 0 for the first run, 1 after the first restart, ...
  long evaluations = 0;
  int restarts = 0;

  bool operator==(const RunTrace&) const = default;
};

using BatchObjective = std::function<void(const std::vector<std::vector<double>>& xs, std::vector<double>& f)>;
using IntBatchObjective = std::function<void(const std::vector<std::vector<int>>& xs, std::vector<double>& f)>;

struct MinimizeResult {
  std::vector<double> best_x;
  double best_f = 0.0;
  RunTrace trace;
};

struct IntMinimizeResult {
  std::vector<int> best_x;
  double best_f = 0.0;
  RunTrace trace;
};

/// (mu/mu_w, lambda)-CMA-ES with cumulative step-size adaptation and rank-one plus
/// rank-mu covariance updates. The first run starts at `initial_mean`; restarts draw a
/// fresh mean uniformly from [restart_lower, restart_upper]. `x_scale` converts
/// coordinates to the units of x_tol (empty means 1).
MinimizeResult minimize_cmaes(std::span<const double> initial_mean, std::span<const double> x_scale,
                              std::span<const double> restart_lower, std::span<const double> restart_upper,
                              const BatchObjective& objective, const EvolutionConfig& config);

/// Integer GA: uniform initialisation, truncation selection of the best parents (kept
/// in the next generation), single-point crossover, uniform reset mutation. A run ends
/// after ga_stall_generations generations without an improvement larger than
/// ga_stall_epsilon.
IntMinimizeResult minimize_ga(std::span<const int> option_counts, const IntBatchObjective& objective,
                                   const EvolutionConfig& config,
                                   const std::vector<std::vector<int>>& initial_population = {});

using GenomeEvaluator = std::function<EvaluatedIndividual(std::span<const double>)>;

struct EvolutionResult {
  EvaluatedIndividual best;
  RunTrace trace;
  std::vector<EvaluatedIndividual> archive;  // best distinct feasible schedules, cheapest first
};

/// CMA-ES over genes normalised to [0, 1] (mean starts at 0.5), scaled to option
/// indices before decoding.
EvolutionResult run_cma_es(const Problem& problem, const EvolutionConfig& config,
                           const GenomeEvaluator& evaluator = {});
EvolutionResult run_ga(const Problem& problem, const EvolutionConfig& config, const GenomeEvaluator& evaluator = {});
EvolutionResult run_evolution(const Problem& problem, const EvolutionConfig& config);

}  // namespace campsched
