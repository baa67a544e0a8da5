#include <random>
#include <set>

#include "doctest.h"

#include "campsched/precedence.hpp"
#include "campsched/problem.hpp"
#include "oracles.hpp"

using namespace campsched;

namespace {

// Random DAG over n recurring activities: edges only from lower to higher index.
std::vector<std::pair<int, int>> random_dag(int n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(density);
  std::vector<std::pair<int, int>> edges;
  for (int q = 0; q < n; ++q) {
    for (int p = 0; p < q; ++p) {
      if (coin(rng)) edges.emplace_back(p, q);
    }
  }
  return edges;
}

Instance dag_instance(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<Activity> acts;
  for (int i = 0; i < n; ++i) acts.push_back(oracle::recurring(100 + i, 1, 1, 1));
  for (const auto& [p, q] : edges) acts[q].precedences.push_back(100 + p);
  return oracle::make_instance(std::move(acts), 1);
}

}  // namespace

TEST_CASE("levels without edges are zero") {
  const Instance inst = dag_instance(4, {});
  const PrecedenceInfo info = compute_levels(inst);
  CHECK(info.level == std::vector<int>{0, 0, 0, 0});
  CHECK(info.level_after == std::vector<int>{0, 0, 0, 0});
}

TEST_CASE("levels of a chain") {
  const PrecedenceInfo info = compute_levels(dag_instance(3, {{0, 1}, {1, 2}}));
  CHECK(info.level == std::vector<int>{0, 1, 2});
  CHECK(info.level_after == std::vector<int>{2, 1, 0});
}

TEST_CASE("levels of a cycle are rejected") {
  Instance inst = dag_instance(2, {{0, 1}});
  inst.activities[0].precedences.push_back(101);
  CHECK_THROWS_WITH_AS(compute_levels(inst), "precedence cycle", ValidationError);
}

TEST_CASE("levels match exhaustive longest paths on random DAGs") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto edges = random_dag(12, 0.2, rng);
    std::vector<int> level, after;
    oracle::longest_chains(12, edges, level, after);
    // Orders activities in reverse so the library cannot rely on index order.
    std::vector<std::pair<int, int>> flipped;
    for (const auto& [p, q] : edges) flipped.emplace_back(11 - p, 11 - q);
    std::vector<Activity> acts;
    for (int i = 0; i < 12; ++i) acts.push_back(oracle::recurring(100 + i, 1, 1, 1));
    for (const auto& [p, q] : flipped) acts[q].precedences.push_back(100 + p);
    const PrecedenceInfo info = compute_levels(oracle::make_instance(acts, 1));
    for (int i = 0; i < 12; ++i) {
      CHECK(info.level[11 - i] == level[i]);
      CHECK(info.level_after[11 - i] == after[i]);
    }
    for (const auto& [p, q] : flipped) {
      CHECK(info.level[q] >= info.level[p] + 1);
      CHECK(info.level_after[p] >= info.level_after[q] + 1);
    }
  }
}

TEST_CASE("allowed weekdays") {
  CHECK(allowed_weekdays(0, 0) == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(allowed_weekdays(1, 1) == std::vector<int>{1, 2, 3});
  CHECK(allowed_weekdays(3, 2).empty());
  CHECK(allowed_weekdays(4, 0) == std::vector<int>{4});
}

TEST_CASE("allowed weekdays equal exhaustive placement on small DAGs") {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + trial % 6;  // up to 8 nodes
    const auto edges = random_dag(n, 0.35, rng);
    std::vector<int> level, after;
    oracle::longest_chains(n, edges, level, after);
    for (int v = 0; v < n; ++v) {
      const auto exhaustive = oracle::placeable_weekdays(n, edges, v);
      const auto allowed = allowed_weekdays(level[v], after[v]);
      CHECK(std::set<int>(allowed.begin(), allowed.end()) == exhaustive);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("problem rejects recurring activities without a weekday") {
  std::vector<std::pair<int, int>> chain;
  for (int i = 0; i < 5; ++i) chain.emplace_back(i, i + 1);
  CHECK_THROWS_AS(Problem(dag_instance(6, chain)), ValidationError);
  CHECK_NOTHROW(Problem(dag_instance(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}})));
}
