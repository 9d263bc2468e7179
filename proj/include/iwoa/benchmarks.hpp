#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace iwoa {

// Classical unconstrained test functions. All take any Eigen vector
// expression and return its scalar type; the minimum value of each is 0.

template <typename Derived>
typename Derived::Scalar sphere(const Eigen::MatrixBase<Derived>& x)
{
    return x.squaredNorm();
}

template <typename Derived>
typename Derived::Scalar schwefel_2_22(const Eigen::MatrixBase<Derived>& x)
{
    const auto a = x.array().abs();
    return a.sum() + a.prod();
}

template <typename Derived>
typename Derived::Scalar schwefel_1_2(const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    Scalar partial(0);
    Scalar total(0);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        partial += x(i);
        total += partial * partial;
    }
    return total;
}

template <typename Derived>
typename Derived::Scalar schwefel_2_21(const Eigen::MatrixBase<Derived>& x)
{
    return x.cwiseAbs().maxCoeff();
}

template <typename Derived>
typename Derived::Scalar ackley(const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    using std::cos;
    using std::exp;
    using std::sqrt;
    const Scalar n = static_cast<Scalar>(x.size());
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    const Scalar quad = x.squaredNorm() / n;
    const Scalar cosine = (two_pi * x.array()).cos().sum() / n;
    return Scalar(-20) * exp(Scalar(-0.2) * sqrt(quad)) - exp(cosine) + Scalar(20) + std::numbers::e_v<Scalar>;
}

/// Boundary penalty u(x, a, k, m), applied per coordinate and summed.
template <typename Derived>
typename Derived::Scalar penalty_u(const Eigen::MatrixBase<Derived>& x, double a, double k, double m)
{
    using Scalar = typename Derived::Scalar;
    Scalar total(0);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const Scalar v = x(i);
        if (v > a) {
            total += k * std::pow(v - a, m);
        } else if (v < -a) {
            total += k * std::pow(-v - a, m);
        }
    }
    return total;
}

template <typename Derived>
typename Derived::Scalar penalized_1(const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    using std::sin;
    const Eigen::Index n = x.size();
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const auto y = (Scalar(1) + (x.array() + Scalar(1)) / Scalar(4)).eval();
    const auto sq = [](Scalar v) { return v * v; };
    Scalar body = Scalar(10) * sq(sin(pi * y(0)));
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        body += sq(y(i) - Scalar(1)) * (Scalar(1) + Scalar(10) * sq(sin(pi * y(i + 1))));
    }
    body += sq(y(n - 1) - Scalar(1));
    return pi / static_cast<Scalar>(n) * body + penalty_u(x, 10.0, 100.0, 4.0);
}

template <typename Derived>
typename Derived::Scalar penalized_2(const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    using std::sin;
    const Eigen::Index n = x.size();
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const auto sq = [](Scalar v) { return v * v; };
    Scalar body = sq(sin(Scalar(3) * pi * x(0)));
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        body += sq(x(i) - Scalar(1)) * (Scalar(1) + sq(sin(Scalar(3) * pi * x(i + 1))));
    }
    body += sq(x(n - 1) - Scalar(1)) * (Scalar(1) + sq(sin(Scalar(2) * pi * x(n - 1))));
    return Scalar(0.1) * body + penalty_u(x, 5.0, 100.0, 4.0);
}

enum class Modality { single_peak, multi_peak };

using BenchmarkFn = double (*)(const Eigen::Ref<const Eigen::VectorXd>&);

struct BenchmarkFunction {
    std::string_view label;
    std::string_view name;
    double low;
    double high;
    double optimum_value;
    Modality modality;
    BenchmarkFn fn;
};

/// F1..F7 in label order.
std::span<const BenchmarkFunction> benchmark_registry();

/// Lookup by label ("F1".."F7"); throws std::invalid_argument otherwise.
const BenchmarkFunction& benchmark(std::string_view label);

/// Throws std::invalid_argument on an empty vector.
double evaluate(const BenchmarkFunction& fn, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace iwoa
