#include "iwoa/optimizer.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <chrono>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace iwoa {

void Problem::validate() const
{
    if (!objective) {
        throw std::invalid_argument("Problem: objective not set");
    }
    if (low.size() == 0 || low.size() != high.size()) {
        throw std::invalid_argument("Problem: bounds must be non-empty and of equal length");
    }
    for (Eigen::Index j = 0; j < low.size(); ++j) {
        if (!(low(j) < high(j))) {
            throw std::invalid_argument("Problem: need low < high in dimension " + std::to_string(j));
        }
    }
}

Problem make_problem(const BenchmarkFunction& fn, Eigen::Index dim)
{
    if (dim < 1) {
        throw std::invalid_argument("make_problem: dimension must be at least 1");
    }
    return Problem{fn.fn, Eigen::VectorXd::Constant(dim, fn.low), Eigen::VectorXd::Constant(dim, fn.high)};
}

std::string_view to_string(Algorithm a) noexcept
{
    switch (a) {
    case Algorithm::woa: return "WOA";
    case Algorithm::iwoa: return "IWOA";
    case Algorithm::gwo: return "GWO";
    case Algorithm::ssa: return "SSA";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name)
{
    std::string up(name);
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
    for (auto a : {Algorithm::woa, Algorithm::iwoa, Algorithm::gwo, Algorithm::ssa}) {
        if (up == to_string(a)) {
            return a;
        }
    }
    throw std::invalid_argument("unknown algorithm '" + std::string(name) + "' (expected WOA, IWOA, GWO or SSA)");
}

void OptimizerConfig::validate() const
{
    if (population < 2) {
        throw std::invalid_argument("OptimizerConfig: population must be at least 2");
    }
    if (max_iterations < 1) {
        throw std::invalid_argument("OptimizerConfig: max_iterations must be at least 1");
    }
    if (!std::isfinite(spiral_b)) {
        throw std::invalid_argument("OptimizerConfig: spiral constant must be finite");
    }
    ou.validate();
    if (!(ssa.producer_fraction > 0.0 && ssa.producer_fraction < 1.0) ||
        !(ssa.scout_fraction >= 0.0 && ssa.scout_fraction <= 1.0) ||
        !(ssa.safety_threshold >= 0.0 && ssa.safety_threshold <= 1.0)) {
        throw std::invalid_argument("OptimizerConfig: SSA fractions must lie in (0, 1)");
    }
}

double convergence_factor_linear(double iter, double max_iter)
{
    return 2.0 * (1.0 - iter / max_iter);
}

double convergence_factor_sigmoid(double iter, double max_iter)
{
    return 4.0 * (1.0 / (1.0 + std::exp(6.0 * (iter / max_iter - 1.0))) - 0.5);
}

Eigen::VectorXd encircle_update(const Eigen::VectorXd& x, const Eigen::VectorXd& best, double a, RngStream& rng,
                                const Problem& problem)
{
    const double coef = 2.0 * a * rng.uniform() - a;
    const double r2 = rng.uniform();
    return problem.clamp(encircle_step(x, best, coef, r2));
}

Eigen::VectorXd spiral_update(const Eigen::VectorXd& x, const Eigen::VectorXd& best, double b, RngStream& rng,
                              const Problem& problem)
{
    const double l = rng.uniform(-1.0, 1.0);
    return problem.clamp(spiral_step(x, best, b, l));
}

Eigen::VectorXd search_update(const Eigen::VectorXd& x, const Eigen::VectorXd& x_rand, double a, RngStream& rng,
                              const Problem& problem)
{
    return encircle_update(x, x_rand, a, rng, problem);
}

std::pair<Eigen::VectorXd, double> ou_mutate_best(const Eigen::VectorXd& best, double best_f, double ou_value,
                                                  const Problem& problem)
{
    Eigen::VectorXd candidate = problem.clamp(best * (1.0 + ou_value));
    const double f = problem.objective(candidate);
    if (f < best_f) {
        return {std::move(candidate), f};
    }
    return {best, best_f};
}

namespace {

using Clock = std::chrono::steady_clock;

Eigen::MatrixXd uniform_population(const Problem& problem, int n, RngStream rng)
{
    Eigen::MatrixXd pop(n, problem.dim());
    for (int i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < problem.dim(); ++j) {
            pop(i, j) = rng.uniform(problem.low(j), problem.high(j));
        }
    }
    return pop;
}

struct Incumbent {
    Eigen::VectorXd x;
    double f = INFINITY;
    int index = 0;
};

/// Evaluate every row; returns fitness and improves the incumbent in place.
Eigen::VectorXd evaluate_population(const Problem& problem, const Eigen::MatrixXd& pop, Incumbent& best)
{
    Eigen::VectorXd fit(pop.rows());
    for (Eigen::Index i = 0; i < pop.rows(); ++i) {
        fit(i) = problem.objective(pop.row(i).transpose());
        // The first row seeds the incumbent even when every fitness is infinite.
        if (fit(i) < best.f || best.x.size() == 0) {
            best.f = fit(i);
            best.x = pop.row(i).transpose();
            best.index = static_cast<int>(i);
        }
    }
    return fit;
}

/// Shared WOA position update for one whale: the p / |A| three-way split.
void whale_move(Eigen::MatrixXd& pop, Eigen::Index i, const Incumbent& best, double a, double b, RngStream& rng,
                const Problem& problem)
{
    const double r1 = rng.uniform();
    const double r2 = rng.uniform();
    const double p = rng.uniform();
    const double coef = 2.0 * a * r1 - a;
    const Eigen::VectorXd x = pop.row(i).transpose();
    Eigen::VectorXd next;
    if (p < 0.5) {
        if (std::abs(coef) < 1.0) {
            next = encircle_step(x, best.x, coef, r2);
        } else {
            const auto k = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(pop.rows())));
            const Eigen::VectorXd leader = pop.row(k).transpose();
            next = encircle_step(x, leader, coef, r2);
        }
    } else {
        next = spiral_step(x, best.x, b, rng.uniform(-1.0, 1.0));
    }
    pop.row(i) = problem.clamp(next).transpose();
}

RunResult finish(Incumbent best, std::vector<double> curve, std::uint64_t seed, Clock::time_point start)
{
    RunResult out;
    out.best_x = std::move(best.x);
    out.best_f = best.f;
    out.curve = std::move(curve);
    out.seed = seed;
    out.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
}

}  // namespace

RunResult run_woa(const Problem& problem, const OptimizerConfig& config, std::uint64_t seed,
                  const IterationObserver& observer)
{
    problem.validate();
    config.validate();
    const auto start = Clock::now();
    const RngStream root(seed);
    RngStream rng = root.split("moves");
    Eigen::MatrixXd pop = uniform_population(problem, config.population, root.split("init"));

    Incumbent best;
    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(config.max_iterations));
    for (int t = 1; t <= config.max_iterations; ++t) {
        evaluate_population(problem, pop, best);
        curve.push_back(best.f);
        if (observer) {
            observer(t, best.f);
        }
        const double a = convergence_factor_linear(t, config.max_iterations);
        for (Eigen::Index i = 0; i < pop.rows(); ++i) {
            whale_move(pop, i, best, a, config.spiral_b, rng, problem);
        }
    }
    return finish(std::move(best), std::move(curve), seed, start);
}

RunResult run_iwoa(const Problem& problem, const OptimizerConfig& config, std::uint64_t seed,
                   const IterationObserver& observer)
{
    problem.validate();
    config.validate();
    const auto start = Clock::now();
    const RngStream root(seed);
    RngStream rng = root.split("moves");
    RngStream ou_rng = root.split("ou");
    const Eigen::VectorXd ou = ou_path(config.ou, ou_rng);
    Eigen::MatrixXd pop = tent_init(config.population, problem.low, problem.high, root.split("init"));

    const auto n = static_cast<std::size_t>(config.population);
    const auto t_max = static_cast<std::size_t>(config.max_iterations);
    Incumbent best;
    std::vector<double> curve;
    curve.reserve(t_max);
    for (int t = 1; t <= config.max_iterations; ++t) {
        evaluate_population(problem, pop, best);

        // One greedy OU perturbation of the incumbent per whale m, each reading
        // its own sample of the path. On acceptance the holder of the incumbent moves too.
        for (std::size_t m = 1; m <= n; ++m) {
            const std::size_t b = ou_index(static_cast<std::size_t>(t), m, config.ou.length, t_max, n);
            auto [x_new, f_new] = ou_mutate_best(best.x, best.f, ou(static_cast<Eigen::Index>(b)), problem);
            if (f_new < best.f) {
                best.x = std::move(x_new);
                best.f = f_new;
                pop.row(best.index) = best.x.transpose();
            }
        }

        curve.push_back(best.f);
        if (observer) {
            observer(t, best.f);
        }
        const double a = convergence_factor_sigmoid(t, config.max_iterations);
        for (Eigen::Index i = 0; i < pop.rows(); ++i) {
            whale_move(pop, i, best, a, config.spiral_b, rng, problem);
        }
    }
    return finish(std::move(best), std::move(curve), seed, start);
}

RunResult run_gwo(const Problem& problem, const OptimizerConfig& config, std::uint64_t seed,
                  const IterationObserver& observer)
{
    problem.validate();
    config.validate();
    const auto start = Clock::now();
    const RngStream root(seed);
    RngStream rng = root.split("moves");
    Eigen::MatrixXd pop = uniform_population(problem, config.population, root.split("init"));
    const Eigen::Index dim = problem.dim();

    // Alpha, beta, delta: the three best positions found so far.
    std::array<Incumbent, 3> leaders;
    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(config.max_iterations));
    for (int t = 1; t <= config.max_iterations; ++t) {
        for (Eigen::Index i = 0; i < pop.rows(); ++i) {
            const double f = problem.objective(pop.row(i).transpose());
            Incumbent cand{pop.row(i).transpose(), f, static_cast<int>(i)};
            if (f < leaders[0].f || leaders[0].x.size() == 0) {
                leaders[2] = std::move(leaders[1]);
                leaders[1] = std::move(leaders[0]);
                leaders[0] = std::move(cand);
            } else if (f < leaders[1].f) {
                leaders[2] = std::move(leaders[1]);
                leaders[1] = std::move(cand);
            } else if (f < leaders[2].f) {
                leaders[2] = std::move(cand);
            }
        }
        curve.push_back(leaders[0].f);
        if (observer) {
            observer(t, leaders[0].f);
        }
        const double a = convergence_factor_linear(t, config.max_iterations);
        // With fewer than three distinct wolves, missing ranks fall back to the alpha.
        const Eigen::VectorXd& alpha = leaders[0].x;
        const Eigen::VectorXd& beta = leaders[1].x.size() ? leaders[1].x : alpha;
        const Eigen::VectorXd& delta = leaders[2].x.size() ? leaders[2].x : beta;
        for (Eigen::Index i = 0; i < pop.rows(); ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                const double x = pop(i, j);
                double sum = 0.0;
                for (const Eigen::VectorXd* leader : {&alpha, &beta, &delta}) {
                    const double coef = 2.0 * a * rng.uniform() - a;
                    const double c = 2.0 * rng.uniform();
                    sum += (*leader)(j) - coef * std::abs(c * (*leader)(j) - x);
                }
                pop(i, j) = std::clamp(sum / 3.0, problem.low(j), problem.high(j));
            }
        }
    }
    return finish(std::move(leaders[0]), std::move(curve), seed, start);
}

RunResult run_ssa(const Problem& problem, const OptimizerConfig& config, std::uint64_t seed,
                  const IterationObserver& observer)
{
    problem.validate();
    config.validate();
    const auto start = Clock::now();
    const RngStream root(seed);
    RngStream rng = root.split("moves");
    const int n = config.population;
    const Eigen::Index dim = problem.dim();
    const int producers = std::clamp(static_cast<int>(std::lround(n * config.ssa.producer_fraction)), 1, n);
    const int scouts = std::clamp(static_cast<int>(std::lround(n * config.ssa.scout_fraction)), 0, n);
    const double tiny = 1e-50;

    Eigen::MatrixXd x = uniform_population(problem, n, root.split("init"));
    Incumbent best;
    // Personal bests; the update rules act on these.
    Eigen::MatrixXd px = x;
    Eigen::VectorXd pfit = evaluate_population(problem, x, best);

    std::vector<int> order(static_cast<std::size_t>(n));
    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(config.max_iterations));
    for (int t = 1; t <= config.max_iterations; ++t) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return pfit(a) < pfit(b); });
        Eigen::Index worst_i = 0;
        const double fmax = pfit.maxCoeff(&worst_i);
        const Eigen::VectorXd worst = px.row(worst_i).transpose();

        // Producers.
        const bool safe = rng.uniform() < config.ssa.safety_threshold;
        for (int r = 0; r < producers; ++r) {
            const int i = order[static_cast<std::size_t>(r)];
            if (safe) {
                // r1 in (0, 1]; exp(-rank / (r1 * T)).
                const double r1 = 1.0 - rng.uniform();
                x.row(i) = px.row(i) * std::exp(-(r + 1.0) / (r1 * config.max_iterations));
            } else {
                x.row(i) = px.row(i).array() + rng.normal();
            }
            x.row(i) = problem.clamp(x.row(i).transpose()).transpose();
        }
        // Best producer position after the move drives the scroungers.
        Eigen::Index lead = order[0];
        double lead_f = INFINITY;
        for (int r = 0; r < producers; ++r) {
            const int i = order[static_cast<std::size_t>(r)];
            const double f = problem.objective(x.row(i).transpose());
            if (f < lead_f) {
                lead_f = f;
                lead = i;
            }
        }
        const Eigen::VectorXd lead_x = x.row(lead).transpose();

        // Scroungers.
        for (int r = producers; r < n; ++r) {
            const int i = order[static_cast<std::size_t>(r)];
            const double rank = r + 1.0;
            if (rank > n / 2.0) {
                x.row(i) = rng.normal() * ((worst.transpose() - px.row(i)) / (rank * rank)).array().exp();
            } else {
                // A+ = A^T (A A^T)^-1 with A a random +-1 row, so A+ = A / dim.
                double step = 0.0;
                for (Eigen::Index j = 0; j < dim; ++j) {
                    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
                    step += std::abs(px(i, j) - lead_x(j)) * sign / static_cast<double>(dim);
                }
                x.row(i) = (lead_x.array() + step).transpose();
            }
            x.row(i) = problem.clamp(x.row(i).transpose()).transpose();
        }

        // Scouts: a random subset reacts to danger.
        for (int s = 0; s < scouts; ++s) {
            const auto k = static_cast<std::size_t>(s) + rng.index(static_cast<std::size_t>(n - s));
            std::swap(order[static_cast<std::size_t>(s)], order[k]);
            const int i = order[static_cast<std::size_t>(s)];
            if (pfit(i) > best.f) {
                for (Eigen::Index j = 0; j < dim; ++j) {
                    x(i, j) = best.x(j) + rng.normal() * std::abs(px(i, j) - best.x(j));
                }
            } else {
                const double k_step = rng.uniform(-1.0, 1.0);
                const double denom = pfit(i) - fmax + tiny;
                if (std::isfinite(denom)) {
                    x.row(i) = px.row(i) + k_step * (px.row(i) - worst.transpose()).cwiseAbs() / denom;
                }
            }
            x.row(i) = problem.clamp(x.row(i).transpose()).transpose();
        }

        for (int i = 0; i < n; ++i) {
            const double f = problem.objective(x.row(i).transpose());
            if (f < pfit(i)) {
                pfit(i) = f;
                px.row(i) = x.row(i);
            }
            if (f < best.f) {
                best.f = f;
                best.x = x.row(i).transpose();
                best.index = i;
            }
        }
        curve.push_back(best.f);
        if (observer) {
            observer(t, best.f);
        }
    }
    return finish(std::move(best), std::move(curve), seed, start);
}

RunResult run(const Problem& problem, const OptimizerConfig& config, std::uint64_t seed,
              const IterationObserver& observer)
{
    switch (config.algorithm) {
    case Algorithm::woa: return run_woa(problem, config, seed, observer);
    case Algorithm::iwoa: return run_iwoa(problem, config, seed, observer);
    case Algorithm::gwo: return run_gwo(problem, config, seed, observer);
    case Algorithm::ssa: return run_ssa(problem, config, seed, observer);
    }
    throw std::logic_error("run: unhandled algorithm");
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index)
{
    return RngStream(master_seed).split(static_cast<std::uint64_t>(run_index)).seed();
}

RunStats summarize(const std::vector<RunResult>& runs)
{
    RunStats s;
    s.runs = static_cast<int>(runs.size());
    if (runs.empty()) {
        return s;
    }
    double sum = 0.0;
    s.best = INFINITY;
    for (const auto& r : runs) {
        sum += r.best_f;
        s.best = std::min(s.best, r.best_f);
    }
    s.mean = sum / static_cast<double>(runs.size());
    if (runs.size() > 1) {
        double ss = 0.0;
        for (const auto& r : runs) {
            ss += (r.best_f - s.mean) * (r.best_f - s.mean);
        }
        s.std_dev = std::sqrt(ss / static_cast<double>(runs.size() - 1));
    }
    return s;
}

RepeatedRuns run_repeated(const Problem& problem, const OptimizerConfig& config, int n_runs,
                          std::uint64_t master_seed, int threads)
{
    if (n_runs < 1) {
        throw std::invalid_argument("run_repeated: n_runs must be at least 1");
    }
    RepeatedRuns out;
    out.runs.resize(static_cast<std::size_t>(n_runs));
    const int workers = std::clamp(threads, 1, n_runs);
    if (workers == 1) {
        for (int i = 0; i < n_runs; ++i) {
            out.runs[static_cast<std::size_t>(i)] = run(problem, config, run_seed(master_seed, static_cast<std::size_t>(i)));
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (int i = next++; i < n_runs; i = next++) {
                        out.runs[static_cast<std::size_t>(i)] =
                            run(problem, config, run_seed(master_seed, static_cast<std::size_t>(i)));
                    }
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (const auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }
    out.stats = summarize(out.runs);
    return out;
}

}  // namespace iwoa
