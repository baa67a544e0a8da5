#include "campsched/evolution.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "parallel.hpp"
#include "rng.hpp"

namespace campsched {

void validate_config(const EvolutionConfig& c) {
  if (c.population_size < 4) throw std::invalid_argument("population_size must be >= 4");
  if (!(c.sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be > 0");
  if (!(c.ga_parent_fraction > 0.0 && c.ga_parent_fraction <= 1.0)) {
    throw std::invalid_argument("ga_parent_fraction must be in (0, 1]");
  }
  if (c.ga_mutation_rate && !(*c.ga_mutation_rate >= 0.0 && *c.ga_mutation_rate <= 1.0)) {
    throw std::invalid_argument("ga_mutation_rate must be in [0, 1]");
  }
  if (c.ga_stall_generations < 1) throw std::invalid_argument("ga_stall_generations must be >= 1");
  if (c.archive_size < 1) throw std::invalid_argument("archive_size must be >= 1");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Budget {
 public:
  explicit Budget(const EvolutionConfig& c)
      : start_(std::chrono::steady_clock::now()),
        seconds_(c.time_budget_s),
        max_evals_(c.max_evaluations),
        max_restarts_(c.max_restarts) {
    // Without any budget a restart loop would never end.
    if (seconds_ <= 0.0 && max_evals_ <= 0 && max_restarts_ < 0) max_restarts_ = 0;
  }

  [[nodiscard]] bool exhausted(long evaluations) const {
    if (max_evals_ > 0 && evaluations >= max_evals_) return true;
    if (seconds_ > 0.0) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
      if (elapsed.count() >= seconds_) return true;
    }
    return false;
  }

  [[nodiscard]] bool may_restart(int restarts_so_far) const {
    return max_restarts_ < 0 || restarts_so_far < max_restarts_;
  }

 private:
  std::chrono::steady_clock::time_point start_;
  double seconds_;
  long max_evals_;
  int max_restarts_;
};

}  // namespace

MinimizeResult minimize_cmaes(std::span<const double> initial_mean, std::span<const double> x_scale,
                              std::span<const double> restart_lower, std::span<const double> restart_upper,
                              const BatchObjective& objective, const EvolutionConfig& config) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  validate_config(config);
  const int n = static_cast<int>(initial_mean.size());
  detail::Rng rng(config.seed);
  Budget budget(config);
  MinimizeResult result;
  result.best_f = kInf;

  if (n == 0) {
    std::vector<std::vector<double>> xs(1);
    std::vector<double> f(1);
    objective(xs, f);
    result.best_f = f[0];
    result.trace.best_cost_per_generation.push_back(f[0]);
    result.trace.run_of_generation.push_back(0);
    result.trace.evaluations = 1;
    return result;
  }

  const int lambda = config.population_size;
  const int mu = lambda / 2;
  VectorXd weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mueff = 1.0 / weights.squaredNorm();
  const double dn = static_cast<double>(n);
  const double cs = (mueff + 2.0) / (dn + mueff + 5.0);
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (dn + 1.0)) - 1.0) + cs;
  const double cc = (4.0 + mueff / dn) / (dn + 4.0 + 2.0 * mueff / dn);
  const double c1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mueff);
  const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((dn + 2.0) * (dn + 2.0) + mueff));
  const double chi_n = std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));
  const int eigen_interval = std::max(1, static_cast<int>(1.0 / ((c1 + cmu) * dn * 10.0)));
  const int ftol_window = std::max(2, static_cast<int>(std::ceil(10.0 * dn / lambda)));

  const auto scale_of = [&](int i) { return x_scale.empty() ? 1.0 : x_scale[i]; };

  std::vector<std::vector<double>> xs(lambda, std::vector<double>(n));
  std::vector<VectorXd> ys(lambda, VectorXd(n));
  std::vector<double> f(lambda);
  std::vector<int> order(lambda);

  for (int run = 0;; ++run) {
    VectorXd mean(n);
    for (int i = 0; i < n; ++i) {
      mean[i] = run == 0 ? initial_mean[i] : rng.uniform(restart_lower[i], restart_upper[i]);
    }
    double sigma = config.sigma0;
    MatrixXd C = MatrixXd::Identity(n, n);
    MatrixXd B = MatrixXd::Identity(n, n);
    VectorXd D = VectorXd::Ones(n);
    VectorXd pc = VectorXd::Zero(n);
    VectorXd ps = VectorXd::Zero(n);
    std::deque<double> recent;
    double run_best = kInf;
    bool stop_all = false;

    for (int gen = 0;; ++gen) {
      for (int k = 0; k < lambda; ++k) {
        VectorXd z(n);
        for (int i = 0; i < n; ++i) z[i] = rng.normal();
        ys[k] = B * D.cwiseProduct(z);
        const VectorXd x = mean + sigma * ys[k];
        for (int i = 0; i < n; ++i) xs[k][i] = x[i];
      }
      objective(xs, f);
      result.trace.evaluations += lambda;

      double gen_best = kInf;
      for (int k = 0; k < lambda; ++k) {
        gen_best = std::min(gen_best, f[k]);
        if (f[k] < result.best_f) {
          result.best_f = f[k];
          result.best_x = xs[k];
        }
      }
      run_best = std::min(run_best, gen_best);
      result.trace.best_cost_per_generation.push_back(run_best);
      result.trace.run_of_generation.push_back(run);

      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });
      VectorXd y_w = VectorXd::Zero(n);
      for (int i = 0; i < mu; ++i) y_w += weights[i] * ys[order[i]];
      mean += sigma * y_w;

      const VectorXd c_inv_sqrt_yw = B * (B.transpose() * y_w).cwiseQuotient(D);
      ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * c_inv_sqrt_yw;
      const double ps_norm = ps.norm();
      const bool hsig =
          ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * (gen + 1))) / chi_n < 1.4 + 2.0 / (dn + 1.0);
      pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * y_w;

      MatrixXd rank_mu = MatrixXd::Zero(n, n);
      for (int i = 0; i < mu; ++i) rank_mu.noalias() += weights[i] * ys[order[i]] * ys[order[i]].transpose();
      C = (1.0 - c1 - cmu) * C + c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * C) + cmu * rank_mu;
      sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

      bool degenerate = !std::isfinite(sigma) || sigma <= 0.0;
      if (!degenerate && (gen + 1) % eigen_interval == 0) {
        C = 0.5 * (C + C.transpose().eval());
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(C);
        const VectorXd ev = eig.eigenvalues();
        if (eig.info() != Eigen::Success || !ev.allFinite() || ev.minCoeff() <= 0.0 ||
            ev.maxCoeff() > 1e14 * ev.minCoeff()) {
          degenerate = true;
        } else {
          B = eig.eigenvectors();
          D = ev.cwiseSqrt();
        }
      }

      recent.push_back(gen_best);
      if (static_cast<int>(recent.size()) > ftol_window) recent.pop_front();
      bool converged = false;
      if (static_cast<int>(recent.size()) == ftol_window) {
        const auto [lo, hi] = std::minmax_element(recent.begin(), recent.end());
        converged = *hi - *lo < config.f_tol;
      }
      double max_std = 0.0;
      for (int i = 0; i < n; ++i) max_std = std::max(max_std, std::sqrt(C(i, i)) * scale_of(i));
      converged = converged || sigma * max_std < config.x_tol;

      if (budget.exhausted(result.trace.evaluations)) {
        stop_all = true;
        break;
      }
      if (degenerate || converged) break;
      if (config.max_generations > 0 && gen + 1 >= config.max_generations) break;
    }
    if (stop_all || !budget.may_restart(run)) break;
    result.trace.restarts = run + 1;
  }
  return result;
}

IntMinimizeResult minimize_ga(std::span<const int> option_counts, const IntBatchObjective& objective,
                              const EvolutionConfig& config, const std::vector<std::vector<int>>& initial_population) {
  validate_config(config);
  const int len = static_cast<int>(option_counts.size());
  const int pop = config.population_size;
  const int n_parents = std::clamp(static_cast<int>(std::lround(config.ga_parent_fraction * pop)), 2, pop);
  const double mutation = config.ga_mutation_rate.value_or(len > 0 ? 1.0 / len : 0.0);
  detail::Rng rng(config.seed);
  Budget budget(config);
  IntMinimizeResult result;
  result.best_f = kInf;

  const auto random_genome = [&] {
    std::vector<int> g(len);
    for (int i = 0; i < len; ++i) g[i] = rng.uniform_int(0, option_counts[i] - 1);
    return g;
  };

  std::vector<std::vector<int>> population;
  std::vector<double> fitness;
  std::vector<int> order(pop);

  const auto evaluate = [&](std::size_t from) {
    std::vector<std::vector<int>> batch(population.begin() + static_cast<long>(from), population.end());
    std::vector<double> f(batch.size());
    objective(batch, f);
    result.trace.evaluations += static_cast<long>(batch.size());
    fitness.resize(from);
    fitness.insert(fitness.end(), f.begin(), f.end());
    for (std::size_t k = from; k < population.size(); ++k) {
      if (fitness[k] < result.best_f) {
        result.best_f = fitness[k];
        result.best_x = population[k];
      }
    }
  };

  for (int run = 0;; ++run) {
    population.clear();
    for (int k = 0; k < pop; ++k) {
      population.push_back(run == 0 && k < static_cast<int>(initial_population.size()) ? initial_population[k]
                                                                                         : random_genome());
    }
    evaluate(0);
    double run_best = *std::min_element(fitness.begin(), fitness.end());
    double reference = run_best;
    int stall = 0;
    bool stop_all = false;
    result.trace.best_cost_per_generation.push_back(run_best);
    result.trace.run_of_generation.push_back(run);

    for (int gen = 1;; ++gen) {
      if (budget.exhausted(result.trace.evaluations)) {
        stop_all = true;
        break;
      }
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fitness[a] < fitness[b]; });
      std::vector<std::vector<int>> next;
      std::vector<double> next_fitness;
      next.reserve(pop);
      for (int i = 0; i < n_parents; ++i) {
        next.push_back(population[order[i]]);
        next_fitness.push_back(fitness[order[i]]);
      }
      while (static_cast<int>(next.size()) < pop) {
        const auto& a = next[rng.uniform_int(0, n_parents - 1)];
        const auto& b = next[rng.uniform_int(0, n_parents - 1)];
        std::vector<int> child = a;
        if (len >= 2) {
          const int cut = rng.uniform_int(1, len - 1);
          std::copy(b.begin() + cut, b.end(), child.begin() + cut);
        }
        for (int i = 0; i < len; ++i) {
          if (mutation > 0.0 && rng.uniform() < mutation) child[i] = rng.uniform_int(0, option_counts[i] - 1);
        }
        next.push_back(std::move(child));
      }
      population = std::move(next);
      fitness = std::move(next_fitness);
      evaluate(static_cast<std::size_t>(n_parents));

      run_best = std::min(run_best, *std::min_element(fitness.begin(), fitness.end()));
      result.trace.best_cost_per_generation.push_back(run_best);
      result.trace.run_of_generation.push_back(run);
      if (run_best < reference - config.ga_stall_epsilon) {
        reference = run_best;
        stall = 0;
      } else if (++stall >= config.ga_stall_generations) {
        break;
      }
      if (config.max_generations > 0 && gen >= config.max_generations) break;
    }
    if (stop_all || !budget.may_restart(run) || budget.exhausted(result.trace.evaluations)) break;
    result.trace.restarts = run + 1;
  }
  return result;
}

namespace {

// Cheapest distinct feasible schedules seen so far.
class Archive {
 public:
  explicit Archive(int capacity) : capacity_(static_cast<std::size_t>(capacity)) {}

  void offer(const EvaluatedIndividual& ind) {
    if (!ind.schedule) return;
    if (items_.size() == capacity_ && ind.cost >= items_.back().cost) return;
    for (const auto& it : items_) {
      if (it.cost == ind.cost && *it.schedule == *ind.schedule) return;
    }
    const auto pos = std::upper_bound(items_.begin(), items_.end(), ind.cost,
                                      [](double c, const EvaluatedIndividual& it) { return c < it.cost; });
    items_.insert(pos, ind);
    if (items_.size() > capacity_) items_.pop_back();
  }

  std::vector<EvaluatedIndividual> take() { return std::move(items_); }

 private:
  std::size_t capacity_;
  std::vector<EvaluatedIndividual> items_;
};

GenomeEvaluator default_evaluator(const Problem& problem, const GenomeEvaluator& evaluator) {
  if (evaluator) return evaluator;
  return [&problem](std::span<const double> genome) { return decode_and_repair(problem, genome); };
}

// Evaluates a batch in parallel, then updates best and archive in index order.
struct Collector {
  const GenomeEvaluator& evaluate;
  int threads;
  Archive archive;
  EvaluatedIndividual best;
  bool have_best = false;

  void run(const std::vector<Genome>& genomes, std::vector<double>& f) {
    std::vector<EvaluatedIndividual> inds(genomes.size());
    detail::parallel_for(genomes.size(), threads, [&](std::size_t i) { inds[i] = evaluate(genomes[i]); });
    for (std::size_t i = 0; i < inds.size(); ++i) {
      f[i] = inds[i].cost;
      archive.offer(inds[i]);
      if (!have_best || inds[i].cost < best.cost) {
        best = std::move(inds[i]);
        have_best = true;
      }
    }
  }
};

}  // namespace

EvolutionResult run_cma_es(const Problem& problem, const EvolutionConfig& config, const GenomeEvaluator& evaluator) {
  const auto eval = default_evaluator(problem, evaluator);
  const auto counts = gene_option_counts(problem);
  const std::size_t n = counts.size();
  const std::vector<double> mean(n, 0.5);
  const std::vector<double> scale(counts.begin(), counts.end());
  const std::vector<double> lower(n, 0.0);
  const std::vector<double> upper(n, 1.0);

  Collector collector{eval, config.threads, Archive(config.archive_size), {}, false};
  const BatchObjective objective = [&](const std::vector<std::vector<double>>& xs, std::vector<double>& f) {
    std::vector<Genome> genomes(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
      genomes[k].resize(n);
      for (std::size_t i = 0; i < n; ++i) genomes[k][i] = xs[k][i] * scale[i];
    }
    collector.run(genomes, f);
  };
  auto res = minimize_cmaes(mean, scale, lower, upper, objective, config);
  return {std::move(collector.best), std::move(res.trace), collector.archive.take()};
}

EvolutionResult run_ga(const Problem& problem, const EvolutionConfig& config, const GenomeEvaluator& evaluator) {
  const auto eval = default_evaluator(problem, evaluator);
  const auto counts = gene_option_counts(problem);
  Collector collector{eval, config.threads, Archive(config.archive_size), {}, false};
  const IntBatchObjective objective = [&](const std::vector<std::vector<int>>& xs, std::vector<double>& f) {
    std::vector<Genome> genomes(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) genomes[k].assign(xs[k].begin(), xs[k].end());
    collector.run(genomes, f);
  };
  auto res = minimize_ga(counts, objective, config);
  return {std::move(collector.best), std::move(res.trace), collector.archive.take()};
}

EvolutionResult run_evolution(const Problem& problem, const EvolutionConfig& config) {
  return config.algorithm == Algorithm::cmaes ? run_cma_es(problem, config) : run_ga(problem, config);
}

}  // namespace campsched
