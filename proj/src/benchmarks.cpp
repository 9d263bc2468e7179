#include "iwoa/benchmarks.hpp"

#include <array>
#include <stdexcept>

namespace iwoa {

namespace {

template <auto F>
double call(const Eigen::Ref<const Eigen::VectorXd>& x)
{
    return F(x);
}

const std::array<BenchmarkFunction, 7> kRegistry{{
    {"F1", "Sphere", -100.0, 100.0, 0.0, Modality::single_peak,
     &call<sphere<Eigen::Ref<const Eigen::VectorXd>>>},
    {"F2", "Schwefel2.22", -10.0, 10.0, 0.0, Modality::single_peak,
     &call<schwefel_2_22<Eigen::Ref<const Eigen::VectorXd>>>},
    {"F3", "Schwefel1.2", -100.0, 100.0, 0.0, Modality::single_peak,
     &call<schwefel_1_2<Eigen::Ref<const Eigen::VectorXd>>>},
    {"F4", "Schwefel2.21", -100.0, 100.0, 0.0, Modality::single_peak,
     &call<schwefel_2_21<Eigen::Ref<const Eigen::VectorXd>>>},
    {"F5", "Ackley", -32.0, 32.0, 0.0, Modality::multi_peak,
     &call<ackley<Eigen::Ref<const Eigen::VectorXd>>>},
    {"F6", "Penalized1", -50.0, 50.0, 0.0, Modality::multi_peak,
     &call<penalized_1<Eigen::Ref<const Eigen::VectorXd>>>},
    {"F7", "Penalized2", -50.0, 50.0, 0.0, Modality::multi_peak,
     &call<penalized_2<Eigen::Ref<const Eigen::VectorXd>>>},
}};

}  // namespace

std::span<const BenchmarkFunction> benchmark_registry()
{
    return kRegistry;
}

const BenchmarkFunction& benchmark(std::string_view label)
{
    for (const auto& f : kRegistry) {
        if (f.label == label) {
            return f;
        }
    }
    throw std::invalid_argument("unknown benchmark label '" + std::string(label) + "' (expected F1..F7)");
}

double evaluate(const BenchmarkFunction& fn, const Eigen::Ref<const Eigen::VectorXd>& x)
{
    if (x.size() == 0) {
        throw std::invalid_argument("evaluate: dimension must be at least 1");
    }
    return fn.fn(x);
}

}  // namespace iwoa
