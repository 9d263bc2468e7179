#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "iwoa/benchmarks.hpp"
#include "iwoa/rand.hpp"

namespace iwoa {

using Objective = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;

/// Box-constrained minimization problem.
struct Problem {
    Objective objective;
    Eigen::VectorXd low;
    Eigen::VectorXd high;

    Eigen::Index dim() const noexcept { return low.size(); }
    /// Throws std::invalid_argument unless low < high everywhere and an objective is set.
    void validate() const;

    template <typename Derived>
    Eigen::VectorXd clamp(const Eigen::MatrixBase<Derived>& x) const
    {
        return x.cwiseMax(low).cwiseMin(high);
    }
};

Problem make_problem(const BenchmarkFunction& fn, Eigen::Index dim);

enum class Algorithm { woa, iwoa, gwo, ssa };

std::string_view to_string(Algorithm a) noexcept;
/// Case-insensitive; throws std::invalid_argument for unknown names.
Algorithm parse_algorithm(std::string_view name);

struct SsaParams {
    double producer_fraction = 0.2;
    double scout_fraction = 0.1;
    double safety_threshold = 0.8;
};

struct OptimizerConfig {
    Algorithm algorithm = Algorithm::iwoa;
    int population = 30;
    int max_iterations = 1000;
    /// Logarithmic spiral constant.
    double spiral_b = 1.0;
    OUParams ou;
    SsaParams ssa;

    void validate() const;
};

struct RunResult {
    Eigen::VectorXd best_x;
    double best_f = INFINITY;
    /// Best-so-far fitness after each iteration; size == max_iterations.
    std::vector<double> curve;
    std::uint64_t seed = 0;
    double wall_time = 0.0;
};

struct RunStats {
    double mean = 0.0;
    double std_dev = 0.0;
    double best = 0.0;
    int runs = 0;
};

struct RepeatedRuns {
    RunStats stats;
    std::vector<RunResult> runs;
};

/// 2 * (1 - iter / max_iter).
double convergence_factor_linear(double iter, double max_iter);
/// 4 * (1 / (1 + exp(6 (iter / max_iter - 1))) - 0.5): flat early, steep late, exactly 0 at the end.
double convergence_factor_sigmoid(double iter, double max_iter);

// Position-update kernels with explicit random draws. `coef` is the
// exploration coefficient A = 2 a r1 - a.

template <typename D1, typename D2>
Eigen::VectorXd encircle_step(const Eigen::MatrixBase<D1>& x, const Eigen::MatrixBase<D2>& leader, double coef,
                              double r2)
{
    return leader - coef * (2.0 * r2 * leader - x).cwiseAbs();
}

template <typename D1, typename D2>
Eigen::VectorXd spiral_step(const Eigen::MatrixBase<D1>& x, const Eigen::MatrixBase<D2>& leader, double b, double l)
{
    return leader + (leader - x).cwiseAbs() * (std::exp(b * l) * std::cos(2.0 * std::numbers::pi * l));
}

// Randomized updates used by the optimizers; each draws its own numbers from
// rng and clamps to the problem box.

Eigen::VectorXd encircle_update(const Eigen::VectorXd& x, const Eigen::VectorXd& best, double a, RngStream& rng,
                                const Problem& problem);
Eigen::VectorXd spiral_update(const Eigen::VectorXd& x, const Eigen::VectorXd& best, double b, RngStream& rng,
                              const Problem& problem);
Eigen::VectorXd search_update(const Eigen::VectorXd& x, const Eigen::VectorXd& x_rand, double a, RngStream& rng,
                              const Problem& problem);

/// Greedy multiplicative perturbation of the incumbent: the candidate
/// best * (1 + ou_value), clamped, replaces it only if strictly fitter.
std::pair<Eigen::VectorXd, double> ou_mutate_best(const Eigen::VectorXd& best, double best_f, double ou_value,
                                                  const Problem& problem);

/// Called after each iteration with (iteration, best-so-far fitness).
using IterationObserver = std::function<void(int, double)>;

RunResult run_woa(const Problem& problem, const OptimizerConfig& config, std::uint64_t seed,
                  const IterationObserver& observer = {});
RunResult run_iwoa(const Problem& problem, const OptimizerConfig& config, std::uint64_t seed,
                   const IterationObserver& observer = {});
RunResult run_gwo(const Problem& problem, const OptimizerConfig& config, std::uint64_t seed,
                  const IterationObserver& observer = {});
RunResult run_ssa(const Problem& problem, const OptimizerConfig& config, std::uint64_t seed,
                  const IterationObserver& observer = {});

/// Dispatch on config.algorithm.
RunResult run(const Problem& problem, const OptimizerConfig& config, std::uint64_t seed,
              const IterationObserver& observer = {});

/// Seed of run i under a master seed.
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index);

/// mean / sample std / min of best_f over runs.
RunStats summarize(const std::vector<RunResult>& runs);

/// n_runs independent runs with seeds split from master_seed. With
/// threads > 1 runs are spread over workers; results are identical and
/// ordered by run index either way.
RepeatedRuns run_repeated(const Problem& problem, const OptimizerConfig& config, int n_runs,
                          std::uint64_t master_seed, int threads = 1);

}  // namespace iwoa
