#include "iwoa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "iwoa/rand.hpp"

namespace iwoa {

SplitIndices split_indices(Eigen::Index n, double test_fraction, std::uint64_t seed)
{
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw std::invalid_argument("split: test fraction must lie in (0, 1)");
    }
    const auto n_test = static_cast<Eigen::Index>(std::llround(static_cast<double>(n) * test_fraction));
    if (n_test < 1 || n_test >= n) {
        throw std::invalid_argument("split: fraction leaves one side empty");
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    // Fisher-Yates driven by our own stream so the split is platform independent.
    RngStream rng = RngStream(seed).split("split");
    for (std::size_t k = order.size() - 1; k > 0; --k) {
        std::swap(order[k], order[static_cast<std::size_t>(rng.index(k + 1))]);
    }
    SplitIndices out;
    out.test.assign(order.begin(), order.begin() + n_test);
    out.train.assign(order.begin() + n_test, order.end());
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed)
{
    data.validate();
    const SplitIndices idx = split_indices(data.size(), test_fraction, seed);
    return {data.subset(idx.train), data.subset(idx.test)};
}

EvalReport evaluate_predictions(const Eigen::VectorXd& actual_k, const Eigen::VectorXd& predicted_k,
                                const std::vector<double>& bands)
{
    EvalReport r;
    r.r2 = r_squared(actual_k, predicted_k);
    r.mse = mse(actual_k, predicted_k);
    r.mae = mae(actual_k, predicted_k);
    r.n_test = actual_k.size();
    // Kelvin differences equal Celsius differences; only the threshold needs converting.
    const double threshold_k = 100.0 + kKelvinOffset;
    r.n_above_100c = (actual_k.array() > threshold_k).count();
    for (const double band : bands) {
        r.hit_rates[band] = hit_rate(actual_k, predicted_k, band);
        if (r.n_above_100c > 0) {
            r.hit_rates_above_100c[band] = hit_rate_above(actual_k, predicted_k, band, threshold_k);
        }
    }
    return r;
}

EvalReport evaluate(const SvrModel& model, const Dataset& test, const std::vector<double>& bands)
{
    test.validate();
    return evaluate_predictions(test.targets, predict_all(model, test.features), bands);
}

}  // namespace iwoa
