#include "iwoa/svr.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "iwoa/rand.hpp"

namespace iwoa {

void Dataset::validate() const
{
    if (targets.size() == 0) {
        throw std::invalid_argument("Dataset: no samples");
    }
    if (features.rows() != targets.size()) {
        throw std::invalid_argument("Dataset: feature rows and targets differ in count");
    }
    if (!features.allFinite() || !targets.allFinite()) {
        throw std::invalid_argument("Dataset: non-finite value");
    }
}

Dataset Dataset::subset(std::span<const Eigen::Index> rows) const
{
    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.targets.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        out.features.row(i) = features.row(rows[k]);
        out.targets(i) = targets(rows[k]);
    }
    out.metadata = metadata;
    return out;
}

void SvrParams::validate() const
{
    if (!(C > 0.0) || !(epsilon >= 0.0) || !(gamma > 0.0) || !std::isfinite(C) || !std::isfinite(epsilon) ||
        !std::isfinite(gamma)) {
        throw std::invalid_argument("SvrParams: need C > 0, epsilon >= 0, gamma > 0, all finite");
    }
}

Eigen::MatrixXd Scaler::transform_features(const Eigen::MatrixXd& x) const
{
    return (x.rowwise() - feature_mean.transpose()).array().rowwise() / feature_std.transpose().array();
}

Eigen::VectorXd Scaler::transform_point(const Eigen::Ref<const Eigen::VectorXd>& x) const
{
    return (x - feature_mean).cwiseQuotient(feature_std);
}

Eigen::VectorXd Scaler::transform_targets(const Eigen::VectorXd& y) const
{
    return (y.array() - target_mean) / target_std;
}

namespace {

double safe_std(double var, double mean)
{
    const double s = std::sqrt(std::max(var, 0.0));
    return s > 1e-12 * std::max(1.0, std::abs(mean)) ? s : 1.0;
}

}  // namespace

Scaler fit_scaler(const Dataset& train)
{
    train.validate();
    const auto n = static_cast<double>(train.size());
    Scaler s;
    s.feature_mean = train.features.colwise().mean().transpose();
    s.feature_std.resize(train.width());
    for (Eigen::Index j = 0; j < train.width(); ++j) {
        const double var = (train.features.col(j).array() - s.feature_mean(j)).square().sum() / n;
        s.feature_std(j) = safe_std(var, s.feature_mean(j));
    }
    s.target_mean = train.targets.mean();
    s.target_std = safe_std((train.targets.array() - s.target_mean).square().sum() / n, s.target_mean);
    return s;
}

Dataset apply_scaler(const Scaler& scaler, const Dataset& data)
{
    Dataset out{scaler.transform_features(data.features), scaler.transform_targets(data.targets), data.metadata};
    return out;
}

Dataset invert_scaler(const Scaler& scaler, const Dataset& data)
{
    Dataset out;
    out.features = (data.features.array().rowwise() * scaler.feature_std.transpose().array()).rowwise() +
                   scaler.feature_mean.transpose().array();
    out.targets = (data.targets.array() * scaler.target_std + scaler.target_mean).matrix();
    out.metadata = data.metadata;
    return out;
}

SvrConvergenceError::SvrConvergenceError(long iterations, double violation)
    : std::runtime_error("SVR solver reached " + std::to_string(iterations) +
                         " iterations with KKT violation " + std::to_string(violation)),
      iterations_(iterations),
      violation_(violation)
{
}

KernelMatrix KernelMatrix::from_points(Eigen::MatrixXd points, double gamma)
{
    KernelMatrix k;
    k.n_ = points.rows();
    k.gamma_ = gamma;
    k.points_ = std::move(points);
    k.cache_.resize(static_cast<std::size_t>(k.n_));
    return k;
}

KernelMatrix KernelMatrix::from_distances(std::shared_ptr<const Eigen::MatrixXd> sq_dist,
                                          std::vector<Eigen::Index> rows, double gamma)
{
    KernelMatrix k;
    k.n_ = static_cast<Eigen::Index>(rows.size());
    k.gamma_ = gamma;
    k.sq_dist_ = std::move(sq_dist);
    k.rows_ = std::move(rows);
    k.cache_.resize(static_cast<std::size_t>(k.n_));
    return k;
}

const Eigen::VectorXd& KernelMatrix::column(Eigen::Index j)
{
    auto& col = cache_[static_cast<std::size_t>(j)];
    if (col.size() == 0) {
        col.resize(n_);
        if (sq_dist_) {
            const auto src = sq_dist_->col(rows_[static_cast<std::size_t>(j)]);
            for (Eigen::Index i = 0; i < n_; ++i) {
                col(i) = src(rows_[static_cast<std::size_t>(i)]);
            }
        } else {
            col = (points_.rowwise() - points_.row(j)).rowwise().squaredNorm();
        }
        col = (-gamma_ * col.array()).exp();
    }
    return col;
}

namespace {

// Two-variable decomposition over the 2l-variable dual with shrinking.
// Variable t < l is alpha_t (y_t = +1), t >= l is alpha*_{t-l} (y_t = -1).
// Both share the point's kernel row, so the gradient is kept per point as
// f = K beta with beta = alpha - alpha*, and G_t = y_t f_b + p_t.
class DualSolver {
public:
    DualSolver(KernelMatrix& kernel, const Eigen::VectorXd& targets, const SvrParams& params,
               const SolverOptions& options)
        : kernel_(kernel), l_(kernel.size()), c_(params.C), eps_(params.epsilon), options_(options), y_(targets)
    {
        alpha_ = Eigen::VectorXd::Zero(2 * l_);
        f_ = Eigen::VectorXd::Zero(l_);
        order_.resize(static_cast<std::size_t>(l_));
        std::iota(order_.begin(), order_.end(), Eigen::Index{0});
        active_ = l_;
    }

    DualSolution solve()
    {
        const long period = std::min<long>(2 * static_cast<long>(l_), 1000);
        long counter = period + 1;
        long iter = 0;
        double violation = 0.0;
        for (;;) {
            if (options_.shrinking && --counter == 0) {
                counter = period;
                shrink();
            }
            Eigen::Index i = -1;
            Eigen::Index j = -1;
            if (select(i, j, violation)) {
                reconstruct();
                if (select(i, j, violation)) {
                    break;
                }
                counter = 1;
            }
            if (iter >= options_.max_iterations) {
                throw SvrConvergenceError(iter, violation);
            }
            ++iter;
            update(i, j);
        }
        return finish(iter, violation);
    }

private:
    static constexpr double kTau = 1e-12;

    Eigen::Index base(Eigen::Index t) const noexcept { return t < l_ ? t : t - l_; }
    double sign(Eigen::Index t) const noexcept { return t < l_ ? 1.0 : -1.0; }
    double grad(Eigen::Index t) const noexcept
    {
        return t < l_ ? f_(t) + eps_ - y_(t) : -f_(t - l_) + eps_ + y_(t - l_);
    }
    bool at_upper(Eigen::Index t) const noexcept { return alpha_(t) >= c_; }
    bool at_lower(Eigen::Index t) const noexcept { return alpha_(t) <= 0.0; }

    // Returns true when the active set satisfies the KKT tolerance.
    bool select(Eigen::Index& i, Eigen::Index& j, double& violation)
    {
        const double* a = alpha_.data();
        const double* au = alpha_.data() + l_;
        const double* f = f_.data();
        const double* y = y_.data();

        // I_up: alpha < C gives -G = y - eps - f; alpha* > 0 gives G = y + eps - f.
        double gmax = -std::numeric_limits<double>::infinity();
        i = -1;
        for (Eigen::Index k = 0; k < active_; ++k) {
            const Eigen::Index b = order_[static_cast<std::size_t>(k)];
            const double r = y[b] - f[b];
            if (a[b] < c_ && r - eps_ >= gmax) {
                gmax = r - eps_;
                i = b;
            }
            if (au[b] > 0.0 && r + eps_ >= gmax) {
                gmax = r + eps_;
                i = b + l_;
            }
        }
        // I_low: alpha > 0 gives G = f + eps - y; alpha* < C gives -G = f - eps - y.
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best_gain = std::numeric_limits<double>::infinity();
        j = -1;
        const double* ki = i >= 0 ? kernel_.column(base(i)).data() : nullptr;
        const auto consider = [&](Eigen::Index t, Eigen::Index b, double v) {
            gmax2 = std::max(gmax2, v);
            const double diff = gmax + v;
            if (ki && diff > 0.0) {
                double quad = 2.0 - 2.0 * ki[b];
                if (quad <= 0.0) {
                    quad = kTau;
                }
                const double gain = -(diff * diff) / quad;
                if (gain <= best_gain) {
                    best_gain = gain;
                    j = t;
                }
            }
        };
        for (Eigen::Index k = 0; k < active_; ++k) {
            const Eigen::Index b = order_[static_cast<std::size_t>(k)];
            const double r = f[b] - y[b];
            if (a[b] > 0.0) {
                consider(b, b, r + eps_);
            }
            if (au[b] < c_) {
                consider(b + l_, b, r - eps_);
            }
        }
        violation = gmax + gmax2;
        return violation < options_.tolerance || i < 0 || j < 0;
    }

    void update(Eigen::Index i, Eigen::Index j)
    {
        const Eigen::Index bi = base(i);
        const Eigen::Index bj = base(j);
        const Eigen::VectorXd& ki = kernel_.column(bi);
        const Eigen::VectorXd& kj = kernel_.column(bj);
        const double gi = grad(i);
        const double gj = grad(j);
        const double old_i = alpha_(i);
        const double old_j = alpha_(j);
        double quad = 2.0 - 2.0 * ki(bj);
        if (quad <= 0.0) {
            quad = kTau;
        }
        double& ai = alpha_(i);
        double& aj = alpha_(j);
        if (sign(i) != sign(j)) {
            const double delta = (-gi - gj) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) {
                    aj = 0.0;
                    ai = diff;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = -diff;
            }
            if (diff > 0.0) {
                if (ai > c_) {
                    ai = c_;
                    aj = c_ - diff;
                }
            } else if (aj > c_) {
                aj = c_;
                ai = c_ + diff;
            }
        } else {
            const double delta = (gi - gj) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > c_) {
                if (ai > c_) {
                    ai = c_;
                    aj = sum - c_;
                }
            } else if (aj < 0.0) {
                aj = 0.0;
                ai = sum;
            }
            if (sum > c_) {
                if (aj > c_) {
                    aj = c_;
                    ai = sum - c_;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = sum;
            }
        }
        const double wi = sign(i) * (ai - old_i);
        const double wj = sign(j) * (aj - old_j);
        double* f = f_.data();
        const double* pi = ki.data();
        const double* pj = kj.data();
        if (active_ == l_) {
            for (Eigen::Index b = 0; b < l_; ++b) {
                f[b] += wi * pi[b] + wj * pj[b];
            }
        } else {
            for (Eigen::Index k = 0; k < active_; ++k) {
                const Eigen::Index b = order_[static_cast<std::size_t>(k)];
                f[b] += wi * pi[b] + wj * pj[b];
            }
        }
    }

    // A variable at a bound whose gradient pushes it further out cannot
    // re-enter the working set soon.
    bool removable(Eigen::Index t, double gmax1, double gmax2) const
    {
        const double g = grad(t);
        if (at_upper(t)) {
            return t < l_ ? -g > gmax1 : -g > gmax2;
        }
        if (at_lower(t)) {
            return t < l_ ? g > gmax2 : g > gmax1;
        }
        return false;
    }

    void shrink()
    {
        double gmax1 = -std::numeric_limits<double>::infinity();
        double gmax2 = -std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < active_; ++k) {
            const Eigen::Index b = order_[static_cast<std::size_t>(k)];
            for (const Eigen::Index t : {b, b + l_}) {
                const double yg = sign(t) * grad(t);
                const bool up = t < l_ ? !at_upper(t) : !at_lower(t);
                const bool low = t < l_ ? !at_lower(t) : !at_upper(t);
                if (up) {
                    gmax1 = std::max(gmax1, -yg);
                }
                if (low) {
                    gmax2 = std::max(gmax2, yg);
                }
            }
        }
        if (!unshrunk_ && gmax1 + gmax2 <= options_.tolerance * 10.0) {
            unshrunk_ = true;
            reconstruct();
        }
        const auto drop = [&](Eigen::Index b) { return removable(b, gmax1, gmax2) && removable(b + l_, gmax1, gmax2); };
        for (Eigen::Index k = 0; k < active_; ++k) {
            if (!drop(order_[static_cast<std::size_t>(k)])) {
                continue;
            }
            --active_;
            while (active_ > k && drop(order_[static_cast<std::size_t>(active_)])) {
                --active_;
            }
            std::swap(order_[static_cast<std::size_t>(k)], order_[static_cast<std::size_t>(active_)]);
        }
    }

    // Recomputes f on the shrunk points and reactivates everything.
    void reconstruct()
    {
        if (active_ == l_) {
            return;
        }
        for (Eigen::Index k = active_; k < l_; ++k) {
            f_(order_[static_cast<std::size_t>(k)]) = 0.0;
        }
        for (Eigen::Index s = 0; s < l_; ++s) {
            const double beta = alpha_(s) - alpha_(s + l_);
            if (beta == 0.0) {
                continue;
            }
            const Eigen::VectorXd& ks = kernel_.column(s);
            for (Eigen::Index k = active_; k < l_; ++k) {
                const Eigen::Index b = order_[static_cast<std::size_t>(k)];
                f_(b) += beta * ks(b);
            }
        }
        active_ = l_;
    }

    DualSolution finish(long iter, double violation) const
    {
        // Bias: mean of y_t G_t over free variables, else the middle of the feasible interval.
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        long n_free = 0;
        double objective = 0.0;
        for (Eigen::Index t = 0; t < 2 * l_; ++t) {
            const double g = grad(t);
            const double yg = sign(t) * g;
            if (at_upper(t)) {
                if (t >= l_) {
                    ub = std::min(ub, yg);
                } else {
                    lb = std::max(lb, yg);
                }
            } else if (at_lower(t)) {
                if (t < l_) {
                    ub = std::min(ub, yg);
                } else {
                    lb = std::max(lb, yg);
                }
            } else {
                ++n_free;
                sum_free += yg;
            }
            // 1/2 a'Qa + p'a = 1/2 sum_t a_t (G_t + p_t).
            const double p = t < l_ ? eps_ - y_(t) : eps_ + y_(t - l_);
            objective += 0.5 * alpha_(t) * (g + p);
        }
        const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

        DualSolution sol;
        sol.coefs = alpha_.head(l_) - alpha_.tail(l_);
        sol.bias = -rho;
        sol.objective = objective;
        sol.iterations = iter;
        sol.violation = violation;
        return sol;
    }

    KernelMatrix& kernel_;
    Eigen::Index l_;
    double c_;
    double eps_;
    SolverOptions options_;
    const Eigen::VectorXd& y_;
    Eigen::VectorXd alpha_;
    Eigen::VectorXd f_;
    // Points in [0, active_) take part in selection and gradient updates.
    std::vector<Eigen::Index> order_;
    Eigen::Index active_ = 0;
    bool unshrunk_ = false;
};

}  // namespace

DualSolution solve_svr_dual(KernelMatrix& kernel, const Eigen::VectorXd& targets, const SvrParams& params,
                            const SolverOptions& options)
{
    params.validate();
    if (targets.size() != kernel.size() || kernel.size() == 0) {
        throw std::invalid_argument("solve_svr_dual: kernel and targets disagree in size");
    }
    if (!targets.allFinite()) {
        throw std::invalid_argument("solve_svr_dual: non-finite target");
    }
    return DualSolver(kernel, targets, params, options).solve();
}

namespace {

SvrModel build_model(const DualSolution& sol, const Eigen::MatrixXd& scaled_x, const SvrParams& params,
                     const Scaler& scaler, double prune)
{
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < sol.coefs.size(); ++i) {
        if (std::abs(sol.coefs(i)) >= prune) {
            keep.push_back(i);
        }
    }
    SvrModel model;
    model.support_vectors.resize(static_cast<Eigen::Index>(keep.size()), scaled_x.cols());
    model.dual_coefs.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        model.support_vectors.row(static_cast<Eigen::Index>(k)) = scaled_x.row(keep[k]);
        model.dual_coefs(static_cast<Eigen::Index>(k)) = sol.coefs(keep[k]);
    }
    model.bias = sol.bias;
    model.params = params;
    model.scaler = scaler;
    model.iterations = sol.iterations;
    model.violation = sol.violation;
    return model;
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x)
{
    const Eigen::VectorXd norms = x.rowwise().squaredNorm();
    Eigen::MatrixXd d = (-2.0 * x * x.transpose()).colwise() + norms;
    d.rowwise() += norms.transpose();
    return d.cwiseMax(0.0);
}

}  // namespace

SvrModel fit_svr(const Dataset& train, const SvrParams& params, const SolverOptions& options)
{
    params.validate();
    const Scaler scaler = fit_scaler(train);
    Eigen::MatrixXd x = scaler.transform_features(train.features);
    const Eigen::VectorXd y = scaler.transform_targets(train.targets);
    KernelMatrix kernel = KernelMatrix::from_points(x, params.gamma);
    const DualSolution sol = solve_svr_dual(kernel, y, params, options);
    return build_model(sol, x, params, scaler, options.prune_threshold);
}

double predict(const SvrModel& model, const Eigen::Ref<const Eigen::VectorXd>& x)
{
    if (x.size() != model.scaler.feature_mean.size()) {
        throw std::invalid_argument("predict: expected " + std::to_string(model.scaler.feature_mean.size()) +
                                    " features, got " + std::to_string(x.size()));
    }
    const Eigen::VectorXd z = model.scaler.transform_point(x);
    double f = model.bias;
    for (Eigen::Index k = 0; k < model.support_count(); ++k) {
        f += model.dual_coefs(k) * rbf_kernel(model.support_vectors.row(k).transpose(), z, model.params.gamma);
    }
    return model.scaler.inverse_target(f);
}

Eigen::VectorXd predict_all(const SvrModel& model, const Eigen::MatrixXd& x)
{
    Eigen::VectorXd out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        out(i) = predict(model, x.row(i).transpose());
    }
    return out;
}

CvObjective::CvObjective(const Dataset& train, int folds, std::uint64_t seed, SolverOptions options)
    : options_(options)
{
    train.validate();
    const Eigen::Index n = train.size();
    if (folds < 2) {
        throw std::invalid_argument("cv_fitness: need at least 2 folds");
    }
    if (folds > n) {
        throw std::invalid_argument("cv_fitness: " + std::to_string(folds) + " folds exceed " + std::to_string(n) +
                                    " samples");
    }
    scaler_ = fit_scaler(train);
    raw_targets_ = train.targets;
    scaled_targets_ = scaler_.transform_targets(train.targets);
    sq_dist_ = std::make_shared<const Eigen::MatrixXd>(squared_distances(scaler_.transform_features(train.features)));

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    RngStream rng = RngStream(seed).split("cv-folds");
    for (std::size_t k = order.size() - 1; k > 0; --k) {
        std::swap(order[k], order[rng.index(k + 1)]);
    }
    fold_rows_.resize(static_cast<std::size_t>(folds));
    train_rows_.resize(static_cast<std::size_t>(folds));
    for (int f = 0; f < folds; ++f) {
        const auto begin = static_cast<std::size_t>(n * f / folds);
        const auto end = static_cast<std::size_t>(n * (f + 1) / folds);
        auto& val = fold_rows_[static_cast<std::size_t>(f)];
        auto& fit = train_rows_[static_cast<std::size_t>(f)];
        for (std::size_t k = 0; k < order.size(); ++k) {
            (k >= begin && k < end ? val : fit).push_back(order[k]);
        }
        std::sort(val.begin(), val.end());
        std::sort(fit.begin(), fit.end());
    }
}

double CvObjective::operator()(const SvrParams& params) const
{
    params.validate();
    double total = 0.0;
    for (std::size_t f = 0; f < fold_rows_.size(); ++f) {
        const auto& fit_rows = train_rows_[f];
        const auto& val_rows = fold_rows_[f];
        KernelMatrix kernel = KernelMatrix::from_distances(sq_dist_, fit_rows, params.gamma);
        Eigen::VectorXd y(static_cast<Eigen::Index>(fit_rows.size()));
        for (std::size_t k = 0; k < fit_rows.size(); ++k) {
            y(static_cast<Eigen::Index>(k)) = scaled_targets_(fit_rows[k]);
        }
        DualSolution sol;
        try {
            sol = solve_svr_dual(kernel, y, params, options_);
        } catch (const SvrConvergenceError&) {
            return std::numeric_limits<double>::infinity();
        }
        std::vector<std::pair<Eigen::Index, double>> support;
        for (Eigen::Index k = 0; k < sol.coefs.size(); ++k) {
            if (std::abs(sol.coefs(k)) >= options_.prune_threshold) {
                support.emplace_back(fit_rows[static_cast<std::size_t>(k)], sol.coefs(k));
            }
        }
        double sse = 0.0;
        for (const Eigen::Index v : val_rows) {
            double pred = sol.bias;
            for (const auto& [row, coef] : support) {
                pred += coef * std::exp(-params.gamma * (*sq_dist_)(row, v));
            }
            const double err = scaler_.inverse_target(pred) - raw_targets_(v);
            sse += err * err;
        }
        total += sse / static_cast<double>(val_rows.size());
    }
    return total / static_cast<double>(fold_rows_.size());
}

double cv_fitness(const SvrParams& params, const Dataset& train, int folds, std::uint64_t seed,
                  const SolverOptions& options)
{
    return CvObjective(train, folds, seed, options)(params);
}

TuneResult tune_svr(const Dataset& train, Algorithm algorithm, OptimizerConfig budget, std::uint64_t seed,
                    const TuneOptions& options, const IterationObserver& observer)
{
    budget.algorithm = algorithm;
    budget.validate();
    const RngStream root(seed);
    const CvObjective cv(train, options.folds, root.split("cv").seed(), options.solver);
    const double eps = options.epsilon;
    const auto to_params = [eps](const Eigen::Ref<const Eigen::VectorXd>& z) {
        return SvrParams{std::pow(10.0, z(0)), eps, std::pow(10.0, z(1))};
    };

    // Every finite evaluation in call order. Bit-identical repeats (whales
    // clamped to the same corner, for example) are served from here.
    std::vector<std::pair<Eigen::Vector2d, double>> history;
    std::map<std::pair<double, double>, double> memo;

    Problem problem;
    problem.low = Eigen::Vector2d(options.log10_c_low, options.log10_gamma_low);
    problem.high = Eigen::Vector2d(options.log10_c_high, options.log10_gamma_high);
    problem.objective = [&](const Eigen::Ref<const Eigen::VectorXd>& z) {
        const auto key = std::make_pair(z(0), z(1));
        if (const auto hit = memo.find(key); hit != memo.end()) {
            return hit->second;
        }
        const double f = cv(to_params(z));
        memo.emplace(key, f);
        if (std::isfinite(f)) {
            history.emplace_back(Eigen::Vector2d(z(0), z(1)), f);
        }
        return f;
    };

    TuneResult out;
    out.run = run(problem, budget, root.split("optimizer").seed(), observer);
    if (!std::isfinite(out.run.best_f)) {
        throw SvrConvergenceError(options.solver.max_iterations, out.run.best_f);
    }
    // The full training set is larger than any CV fit, so the winner can
    // miss the iteration cap there. Fall back through the next-best
    // candidates in fitness order.
    std::stable_sort(history.begin(), history.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });
    const int attempts = std::min<int>(options.refit_attempts, static_cast<int>(history.size()));
    for (int k = 0;; ++k) {
        const Eigen::Vector2d z = k == 0 ? Eigen::Vector2d(out.run.best_x) : history[static_cast<std::size_t>(k)].first;
        out.params = to_params(z);
        out.refit_rank = k;
        out.cv_mse = k == 0 ? out.run.best_f : history[static_cast<std::size_t>(k)].second;
        try {
            out.model = fit_svr(train, out.params, options.solver);
            break;
        } catch (const SvrConvergenceError&) {
            if (k + 1 >= attempts) {
                throw;
            }
        }
    }
    return out;
}

}  // namespace iwoa
