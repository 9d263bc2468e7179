#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "iwoa/dataset.hpp"
#include "iwoa/svr.hpp"

namespace iwoa {

inline constexpr double kKelvinOffset = 273.15;

namespace detail {

template <typename A, typename B>
void check_pair(const Eigen::MatrixBase<A>& y, const Eigen::MatrixBase<B>& yhat, const char* what)
{
    if (y.size() == 0 || y.size() != yhat.size()) {
        throw std::invalid_argument(std::string(what) + ": need equal nonzero lengths");
    }
}

}  // namespace detail

template <typename A, typename B>
double mse(const Eigen::MatrixBase<A>& y, const Eigen::MatrixBase<B>& yhat)
{
    detail::check_pair(y, yhat, "mse");
    return (y - yhat).squaredNorm() / static_cast<double>(y.size());
}

template <typename A, typename B>
double mae(const Eigen::MatrixBase<A>& y, const Eigen::MatrixBase<B>& yhat)
{
    detail::check_pair(y, yhat, "mae");
    return (y - yhat).cwiseAbs().sum() / static_cast<double>(y.size());
}

/// 1 - SS_res / SS_tot. Throws when y has zero variance.
template <typename A, typename B>
double r_squared(const Eigen::MatrixBase<A>& y, const Eigen::MatrixBase<B>& yhat)
{
    detail::check_pair(y, yhat, "r_squared");
    const double mean = y.mean();
    const double ss_tot = (y.array() - mean).square().sum();
    if (!(ss_tot > 0.0)) {
        throw std::invalid_argument("r_squared: actuals have zero variance");
    }
    return 1.0 - (y - yhat).squaredNorm() / ss_tot;
}

/// Fraction of samples with |y - yhat| <= band.
template <typename A, typename B>
double hit_rate(const Eigen::MatrixBase<A>& y, const Eigen::MatrixBase<B>& yhat, double band)
{
    detail::check_pair(y, yhat, "hit_rate");
    if (!(band > 0.0)) {
        throw std::invalid_argument("hit_rate: band must be positive");
    }
    const auto hits = ((y - yhat).array().abs() <= band).count();
    return static_cast<double>(hits) / static_cast<double>(y.size());
}

/// hit_rate over samples whose actual value exceeds `threshold`. Both y and
/// threshold are in the same unit. Throws when no sample qualifies.
template <typename A, typename B>
double hit_rate_above(const Eigen::MatrixBase<A>& y, const Eigen::MatrixBase<B>& yhat, double band, double threshold)
{
    detail::check_pair(y, yhat, "hit_rate_above");
    if (!(band > 0.0)) {
        throw std::invalid_argument("hit_rate_above: band must be positive");
    }
    if (!std::isfinite(threshold)) {
        throw std::invalid_argument("hit_rate_above: threshold must be finite");
    }
    Eigen::Index n = 0;
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) > threshold) {
            ++n;
            hits += std::abs(y(i) - yhat(i)) <= band ? 1 : 0;
        }
    }
    if (n == 0) {
        throw std::invalid_argument("hit_rate_above: no actual value above threshold");
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

/// Row indices of a seeded shuffled split; test size is round(n * fraction).
struct SplitIndices {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> test;
};

SplitIndices split_indices(Eigen::Index n, double test_fraction, std::uint64_t seed);
std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed);

struct EvalReport {
    double r2 = 0.0;
    double mse = 0.0;
    double mae = 0.0;
    /// band in degrees C -> fraction.
    std::map<double, double> hit_rates;
    /// Same, restricted to actual temperatures above 100 C. Empty when no
    /// test sample is that hot.
    std::map<double, double> hit_rates_above_100c;
    Eigen::Index n_test = 0;
    Eigen::Index n_above_100c = 0;
};

/// Metrics from actual and predicted temperatures in kelvin.
EvalReport evaluate_predictions(const Eigen::VectorXd& actual_k, const Eigen::VectorXd& predicted_k,
                                const std::vector<double>& bands = {1.0, 2.0, 3.0, 4.0});

EvalReport evaluate(const SvrModel& model, const Dataset& test, const std::vector<double>& bands = {1.0, 2.0, 3.0, 4.0});

}  // namespace iwoa
