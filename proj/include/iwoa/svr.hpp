#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "iwoa/dataset.hpp"
#include "iwoa/optimizer.hpp"

namespace iwoa {

struct SvrParams {
    /// Penalty factor.
    double C = 1.0;
    /// Tube half-width, in scaled target units.
    double epsilon = 0.1;
    /// RBF width.
    double gamma = 1.0;

    void validate() const;
};

template <typename D1, typename D2>
double rbf_kernel(const Eigen::MatrixBase<D1>& x, const Eigen::MatrixBase<D2>& y, double gamma)
{
    return std::exp(-gamma * (x - y).squaredNorm());
}

/// Per-column standardization learned from training data. Zero-variance
/// columns keep std 1.
struct Scaler {
    Eigen::VectorXd feature_mean;
    Eigen::VectorXd feature_std;
    double target_mean = 0.0;
    double target_std = 1.0;

    Eigen::MatrixXd transform_features(const Eigen::MatrixXd& x) const;
    Eigen::VectorXd transform_point(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    Eigen::VectorXd transform_targets(const Eigen::VectorXd& y) const;
    double inverse_target(double y) const noexcept { return target_mean + target_std * y; }
};

/// Population mean / std of features and target. Throws on an empty dataset.
Scaler fit_scaler(const Dataset& train);
Dataset apply_scaler(const Scaler& scaler, const Dataset& data);
Dataset invert_scaler(const Scaler& scaler, const Dataset& data);

struct SolverOptions {
    /// Stop when the maximal KKT violation m(a) - M(a) drops below this.
    double tolerance = 1e-3;
    /// |dual coef| below this is not a support vector.
    double prune_threshold = 1e-8;
    long max_iterations = 100000;
    /// Temporarily drop bound variables that are unlikely to move.
    bool shrinking = true;
};

/// The solver hit its iteration cap before reaching the KKT tolerance.
class SvrConvergenceError : public std::runtime_error {
public:
    SvrConvergenceError(long iterations, double violation);
    long iterations() const noexcept { return iterations_; }
    double violation() const noexcept { return violation_; }

private:
    long iterations_;
    double violation_;
};

/// Lazily evaluated, cached RBF Gram matrix. Columns are computed on first
/// use either from points or from a shared squared-distance matrix
/// restricted to a subset of its rows.
class KernelMatrix {
public:
    static KernelMatrix from_points(Eigen::MatrixXd points, double gamma);
    static KernelMatrix from_distances(std::shared_ptr<const Eigen::MatrixXd> sq_dist, std::vector<Eigen::Index> rows,
                                       double gamma);

    Eigen::Index size() const noexcept { return n_; }
    const Eigen::VectorXd& column(Eigen::Index j);
    double operator()(Eigen::Index i, Eigen::Index j) { return column(j)(i); }

private:
    KernelMatrix() = default;

    Eigen::Index n_ = 0;
    double gamma_ = 1.0;
    Eigen::MatrixXd points_;
    std::shared_ptr<const Eigen::MatrixXd> sq_dist_;
    std::vector<Eigen::Index> rows_;
    std::vector<Eigen::VectorXd> cache_;
};

struct DualSolution {
    /// alpha_i - alpha_i^* per training point.
    Eigen::VectorXd coefs;
    double bias = 0.0;
    /// Dual objective 1/2 b'Kb - y'b + eps |b|_1 at the solution.
    double objective = 0.0;
    long iterations = 0;
    double violation = 0.0;
};

/// epsilon-SVR dual by two-variable decomposition: the first index is the
/// maximal KKT violator, the second maximizes the second-order gain.
/// Throws SvrConvergenceError at the iteration cap.
DualSolution solve_svr_dual(KernelMatrix& kernel, const Eigen::VectorXd& targets, const SvrParams& params,
                            const SolverOptions& options = {});

/// Trained model. Support vectors, coefficients and bias live in scaled space.
struct SvrModel {
    Eigen::MatrixXd support_vectors;
    Eigen::VectorXd dual_coefs;
    double bias = 0.0;
    SvrParams params;
    Scaler scaler;
    long iterations = 0;
    double violation = 0.0;

    Eigen::Index support_count() const noexcept { return dual_coefs.size(); }
};

/// Standardizes `train`, solves the dual and keeps the support vectors.
SvrModel fit_svr(const Dataset& train, const SvrParams& params, const SolverOptions& options = {});

/// Prediction in raw target units for a raw-unit feature vector.
double predict(const SvrModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
/// One prediction per row of x.
Eigen::VectorXd predict_all(const SvrModel& model, const Eigen::MatrixXd& x);

/// k-fold cross-validated MSE (raw target units) as a reusable objective.
/// Folds come from one seeded shuffle; the scaler is fit once on the whole
/// training set and pairwise distances are computed once and shared.
class CvObjective {
public:
    CvObjective(const Dataset& train, int folds, std::uint64_t seed, SolverOptions options = {});

    /// Mean validation MSE. A fold that fails to converge makes the whole
    /// candidate +infinity.
    double operator()(const SvrParams& params) const;

    int folds() const noexcept { return static_cast<int>(fold_rows_.size()); }

private:
    Scaler scaler_;
    Eigen::VectorXd raw_targets_;
    Eigen::VectorXd scaled_targets_;
    std::shared_ptr<const Eigen::MatrixXd> sq_dist_;
    std::vector<std::vector<Eigen::Index>> fold_rows_;
    std::vector<std::vector<Eigen::Index>> train_rows_;
    SolverOptions options_;
};

double cv_fitness(const SvrParams& params, const Dataset& train, int folds, std::uint64_t seed,
                  const SolverOptions& options = {});

struct TuneOptions {
    int folds = 5;
    double epsilon = 0.1;
    double log10_c_low = -2.0;
    double log10_c_high = 3.0;
    double log10_gamma_low = -4.0;
    double log10_gamma_high = 1.0;
    SolverOptions solver;
    /// Candidates tried, best first, when the final refit misses the cap.
    int refit_attempts = 20;
};

struct TuneResult {
    SvrParams params;
    SvrModel model;
    /// Optimizer run over (log10 C, log10 gamma); curve is the CV-MSE log.
    RunResult run;
    /// CV MSE of the refit candidate and its rank among evaluated candidates
    /// (0 is the optimizer's best).
    double cv_mse = 0.0;
    int refit_rank = 0;
};

/// Searches (log10 C, log10 gamma) with the chosen optimizer, minimizing
/// cross-validated MSE, then refits on all of `train`. Throws
/// SvrConvergenceError when no candidate converges.
TuneResult tune_svr(const Dataset& train, Algorithm algorithm, OptimizerConfig budget, std::uint64_t seed,
                    const TuneOptions& options = {}, const IterationObserver& observer = {});

}  // namespace iwoa
