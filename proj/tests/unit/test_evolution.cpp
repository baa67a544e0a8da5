#include <algorithm>
#include <numeric>

#include "doctest.h"

#include "campsched/evolution.hpp"
#include "campsched/objective.hpp"
#include "oracles.hpp"

using namespace campsched;

namespace {

EvolutionConfig counted(int pop, std::uint64_t seed) {
  EvolutionConfig c;
  c.population_size = pop;
  c.seed = seed;
  c.time_budget_s = 0.0;
  c.max_restarts = 0;
  c.threads = 1;
  return c;
}

void check_monotone_per_run(const RunTrace& t) {
  REQUIRE(t.best_cost_per_generation.size() == t.run_of_generation.size());
  for (std::size_t g = 1; g < t.best_cost_per_generation.size(); ++g) {
    if (t.run_of_generation[g] == t.run_of_generation[g - 1]) {
      CHECK(t.best_cost_per_generation[g] <= t.best_cost_per_generation[g - 1]);
    }
  }
}

}  // namespace

TEST_CASE("config validation") {
  EvolutionConfig c;
  CHECK_NOTHROW(validate_config(c));
  c.population_size = 3;
  CHECK_THROWS_AS(validate_config(c), std::invalid_argument);
  c = {};
  c.ga_parent_fraction = 0.0;
  CHECK_THROWS_AS(validate_config(c), std::invalid_argument);
  c = {};
  c.sigma0 = -1.0;
  CHECK_THROWS_AS(validate_config(c), std::invalid_argument);
}

TEST_CASE("cma-es minimises the sphere") {
  const BatchObjective sphere = [](const std::vector<std::vector<double>>& xs, std::vector<double>& f) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
      f[k] = std::inner_product(xs[k].begin(), xs[k].end(), xs[k].begin(), 0.0);
    }
  };
  EvolutionConfig c = counted(20, 4);
  c.max_generations = 200;
  c.f_tol = 0.0;
  c.x_tol = 0.0;
  const std::vector<double> mean(10, 3.0);
  const std::vector<double> lo(10, -5.0), hi(10, 5.0);
  const auto r = minimize_cmaes(mean, {}, lo, hi, sphere, c);
  CHECK(r.best_f < 1e-6);
  CHECK(r.trace.best_cost_per_generation.size() <= 200);
  CHECK(std::inner_product(r.best_x.begin(), r.best_x.end(), r.best_x.begin(), 0.0) == r.best_f);
  check_monotone_per_run(r.trace);
}

TEST_CASE("cma-es stops on the tolerances and restarts") {
  const BatchObjective flat = [](const std::vector<std::vector<double>>& xs, std::vector<double>& f) {
    std::fill(f.begin(), f.begin() + static_cast<long>(xs.size()), 7.0);
  };
  EvolutionConfig c = counted(10, 1);
  c.max_restarts = 2;
  c.x_tol = 0.0;
  const std::vector<double> mean(3, 0.0), lo(3, -1.0), hi(3, 1.0);
  const auto r = minimize_cmaes(mean, {}, lo, hi, flat, c);
  CHECK(r.trace.restarts == 2);
  CHECK(r.trace.run_of_generation.back() == 2);
  CHECK(r.best_f == 7.0);
  // The f-range window is max(2, ceil(10 n / lambda)) generations.
  CHECK(std::count(r.trace.run_of_generation.begin(), r.trace.run_of_generation.end(), 0) == 3);
}

TEST_CASE("ga solves one-max") {
  const IntBatchObjective onemax = [](const std::vector<std::vector<int>>& xs, std::vector<double>& f) {
    for (std::size_t k = 0; k < xs.size(); ++k) f[k] = -std::accumulate(xs[k].begin(), xs[k].end(), 0.0);
  };
  EvolutionConfig c = counted(100, 9);
  c.max_generations = 500;
  c.ga_stall_generations = 500;
  c.ga_stall_epsilon = 0.5;
  const std::vector<int> counts(50, 2);
  const auto r = minimize_ga(counts, onemax, c);
  CHECK(r.best_f == -50.0);
  check_monotone_per_run(r.trace);
}

TEST_CASE("ga stall triggers after exactly the stall window") {
  const IntBatchObjective any = [](const std::vector<std::vector<int>>& xs, std::vector<double>& f) {
    for (std::size_t k = 0; k < xs.size(); ++k) f[k] = static_cast<double>(xs[k][0]);
  };
  EvolutionConfig c = counted(20, 3);
  c.ga_mutation_rate = 0.0;
  const std::vector<int> counts(5, 4);
  const std::vector<std::vector<int>> same(20, std::vector<int>{2, 1, 3, 0, 1});
  const auto r = minimize_ga(counts, any, c, same);
  CHECK(r.trace.best_cost_per_generation.size() == 501);
  CHECK(r.trace.restarts == 0);
  CHECK(r.best_f == 2.0);
}

TEST_CASE("evolution on instances") {
  SUBCASE("zero activities: one generation gives the base-load cost") {
    const Problem p(oracle::make_instance({}, 1, 2));
    EvolutionConfig c = counted(8, 1);
    const auto r = run_cma_es(p, c);
    REQUIRE(r.best.schedule);
    CHECK(r.best.cost == energy_and_peak_cost(p.instance().base_load.values, p.instance().price.values));
    CHECK(r.trace.best_cost_per_generation.size() == 1);
  }

  SUBCASE("fixed seed is reproducible and the archive is sorted and distinct") {
    const Problem p(generate_synthetic_instance(InstanceSize::small, 1));
    for (Algorithm algo : {Algorithm::cmaes, Algorithm::ga}) {
      EvolutionConfig c = counted(20, 5);
      c.algorithm = algo;
      c.max_evaluations = 400;
      c.max_restarts = -1;
      c.archive_size = 5;
      const auto a = run_evolution(p, c);
      c.threads = 3;
      const auto b = run_evolution(p, c);
      CHECK(a.trace == b.trace);
      CHECK(a.best.cost == b.best.cost);
      CHECK(a.best.genome == b.best.genome);
      CHECK(a.trace.evaluations >= 400);
      check_monotone_per_run(a.trace);
      REQUIRE_FALSE(a.archive.empty());
      CHECK(a.archive.front().cost == a.best.cost);
      for (std::size_t i = 1; i < a.archive.size(); ++i) {
        CHECK(a.archive[i - 1].cost <= a.archive[i].cost);
        for (std::size_t j = 0; j < i; ++j) CHECK_FALSE(*a.archive[i].schedule == *a.archive[j].schedule);
      }
      const auto counts = gene_option_counts(p);
      for (const auto& ind : a.archive) {
        REQUIRE(ind.genome.size() == counts.size());
        CHECK(decode_and_repair(p, ind.genome).cost == ind.cost);
      }
    }
  }
}
