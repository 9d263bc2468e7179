#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "iwoa/benchmarks.hpp"
#include "iwoa/rand.hpp"

using namespace iwoa;

namespace {

// Loop-based reference formulas written independently of the Eigen versions.
double naive_eval(std::string_view label, const std::vector<double>& x)
{
    const double pi = std::numbers::pi;
    const std::size_t n = x.size();
    const auto u = [](double v, double a, double k, double m) {
        if (v > a) return k * std::pow(v - a, m);
        if (v < -a) return k * std::pow(-v - a, m);
        return 0.0;
    };
    double s = 0.0;
    if (label == "F1") {
        for (double v : x) s += v * v;
    } else if (label == "F2") {
        double p = 1.0;
        for (double v : x) {
            s += std::fabs(v);
            p *= std::fabs(v);
        }
        s += p;
    } else if (label == "F3") {
        for (std::size_t i = 0; i < n; ++i) {
            double inner = 0.0;
            for (std::size_t j = 0; j <= i; ++j) inner += x[j];
            s += inner * inner;
        }
    } else if (label == "F4") {
        for (double v : x) s = std::max(s, std::fabs(v));
    } else if (label == "F5") {
        double sq = 0.0;
        double cs = 0.0;
        for (double v : x) {
            sq += v * v;
            cs += std::cos(2.0 * pi * v);
        }
        s = -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 + std::exp(1.0);
    } else if (label == "F6") {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = 1.0 + (x[i] + 1.0) / 4.0;
        double body = 10.0 * std::pow(std::sin(pi * y[0]), 2);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            body += std::pow(y[i] - 1.0, 2) * (1.0 + 10.0 * std::pow(std::sin(pi * y[i + 1]), 2));
        }
        body += std::pow(y[n - 1] - 1.0, 2);
        s = pi / n * body;
        for (double v : x) s += u(v, 10.0, 100.0, 4.0);
    } else if (label == "F7") {
        double body = std::pow(std::sin(3.0 * pi * x[0]), 2);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            body += std::pow(x[i] - 1.0, 2) * (1.0 + std::pow(std::sin(3.0 * pi * x[i + 1]), 2));
        }
        body += std::pow(x[n - 1] - 1.0, 2) * (1.0 + std::pow(std::sin(2.0 * pi * x[n - 1]), 2));
        s = 0.1 * body;
        for (double v : x) s += u(v, 5.0, 100.0, 4.0);
    }
    return s;
}

Eigen::VectorXd random_point(const BenchmarkFunction& fn, Eigen::Index dim, RngStream& rng)
{
    Eigen::VectorXd x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) x(i) = rng.uniform(fn.low, fn.high);
    return x;
}

}  // namespace

TEST_SUITE("benchmarks")
{
    TEST_CASE("registry matches the published bounds and optima")
    {
        const auto reg = benchmark_registry();
        REQUIRE(reg.size() == 7);
        const double bounds[] = {100, 10, 100, 100, 32, 50, 50};
        for (std::size_t i = 0; i < reg.size(); ++i) {
            CHECK(reg[i].label == "F" + std::to_string(i + 1));
            CHECK(reg[i].low == -bounds[i]);
            CHECK(reg[i].high == bounds[i]);
            CHECK(reg[i].optimum_value == 0.0);
            CHECK(&benchmark(reg[i].label) == &reg[i]);
        }
        CHECK(reg[0].modality == Modality::single_peak);
        CHECK(reg[4].modality == Modality::multi_peak);
        CHECK_THROWS_AS(benchmark("F8"), std::invalid_argument);
        CHECK_THROWS_AS(benchmark(""), std::invalid_argument);
    }

    TEST_CASE("examples")
    {
        CHECK(evaluate(benchmark("F1"), Eigen::VectorXd::Zero(30)) == 0.0);
        CHECK(std::abs(evaluate(benchmark("F5"), Eigen::VectorXd::Zero(30))) <= 1e-12);
        CHECK(evaluate(benchmark("F2"), Eigen::Vector3d(1.0, -2.0, 3.0)) == 12.0);
        CHECK(evaluate(benchmark("F6"), Eigen::VectorXd::Constant(30, -1.0)) <= 1e-30);
        CHECK(evaluate(benchmark("F7"), Eigen::VectorXd::Constant(30, 1.0)) <= 1e-30);
        CHECK(evaluate(benchmark("F3"), Eigen::Vector3d(1.0, 2.0, 3.0)) == 1.0 + 9.0 + 36.0);
        CHECK(evaluate(benchmark("F4"), Eigen::Vector3d(1.0, -7.0, 3.0)) == 7.0);
    }

    TEST_CASE("dimension 0 is rejected")
    {
        for (const auto& fn : benchmark_registry()) {
            CHECK_THROWS_AS(evaluate(fn, Eigen::VectorXd()), std::invalid_argument);
        }
    }

    TEST_CASE("agreement with loop-based reference formulas")
    {
        RngStream rng(77);
        for (const auto& fn : benchmark_registry()) {
            for (const Eigen::Index dim : {1, 2, 10, 30}) {
                for (int k = 0; k < 20; ++k) {
                    // Stay inside the box and, for F2, avoid product overflow at dim 30.
                    Eigen::VectorXd x = random_point(fn, dim, rng);
                    const std::vector<double> v(x.data(), x.data() + x.size());
                    const double ref = naive_eval(fn.label, v);
                    const double got = evaluate(fn, x);
                    CHECK(got == doctest::Approx(ref).epsilon(1e-12));
                }
            }
        }
    }

    TEST_CASE("nonnegative on random in-bounds points and pure")
    {
        RngStream rng(3);
        for (const auto& fn : benchmark_registry()) {
            for (int k = 0; k < 200; ++k) {
                const Eigen::VectorXd x = random_point(fn, 10, rng);
                const double a = evaluate(fn, x);
                CHECK(a >= 0.0);
                CHECK(a == evaluate(fn, x));
            }
        }
    }

    TEST_CASE("permutation symmetry of F1, F2, F4, F5")
    {
        RngStream rng(4);
        for (const char* label : {"F1", "F2", "F4", "F5"}) {
            const auto& fn = benchmark(label);
            for (int k = 0; k < 20; ++k) {
                Eigen::VectorXd x = random_point(fn, 8, rng);
                const double a = evaluate(fn, x);
                std::reverse(x.data(), x.data() + x.size());
                std::rotate(x.data(), x.data() + 3, x.data() + x.size());
                CHECK(evaluate(fn, x) == doctest::Approx(a).epsilon(1e-13));
            }
        }
    }

    TEST_CASE("optimum only at the known location")
    {
        RngStream rng(5);
        const auto& f1 = benchmark("F1");
        for (int k = 0; k < 50; ++k) {
            CHECK(evaluate(f1, random_point(f1, 5, rng)) > 0.0);
        }
    }
}
