#include "iwoa/rand.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace iwoa {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t fnv1a(std::string_view s) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t RngStream::mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t RngStream::next_u64() noexcept
{
    ++counter_;
    return mix64(seed_ + counter_ * kGolden);
}

double RngStream::uniform() noexcept
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() noexcept
{
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t RngStream::index(std::size_t n) noexcept
{
    // Lemire's multiply-shift; the bias is below 2^-64 * n and irrelevant here.
    const auto wide = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::size_t>(wide >> 64);
}

RngStream RngStream::split(std::string_view label) const noexcept
{
    return RngStream(mix64(seed_ ^ mix64(fnv1a(label) + kGolden)));
}

RngStream RngStream::split(std::uint64_t index) const noexcept
{
    return RngStream(mix64(seed_ ^ mix64((index + 1) * kGolden ^ 0x5851f42d4c957f2dULL)));
}

double tent_next(double x)
{
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("tent_next: input outside [0, 1]: " + std::to_string(x));
    }
    return x <= 0.5 ? 2.0 * x : 2.0 * (1.0 - x);
}

TentSequence::TentSequence(RngStream rng, int reseed_period) : rng_(rng), period_(reseed_period)
{
    if (period_ < 1 || period_ > 50) {
        throw std::invalid_argument("TentSequence: reseed period must be in [1, 50]");
    }
    reseed();
}

void TentSequence::reseed()
{
    // Odd numerator over 2^53: never a fixed point, never an early collapse.
    const std::uint64_t odd = (rng_.next_u64() >> 11) | 1ULL;
    x_ = static_cast<double>(odd) * 0x1.0p-53;
    steps_ = 0;
}

double TentSequence::next()
{
    if (steps_ == period_) {
        reseed();
    }
    x_ = tent_next(x_);
    ++steps_;
    return x_;
}

Eigen::MatrixXd tent_init(Eigen::Index n, const Eigen::VectorXd& low, const Eigen::VectorXd& high,
                          const RngStream& rng)
{
    if (n < 0) {
        throw std::invalid_argument("tent_init: negative population size");
    }
    if (low.size() != high.size()) {
        throw std::invalid_argument("tent_init: bound vectors differ in length");
    }
    for (Eigen::Index j = 0; j < low.size(); ++j) {
        if (!std::isfinite(low(j)) || !std::isfinite(high(j)) || low(j) > high(j)) {
            throw std::invalid_argument("tent_init: invalid bounds in dimension " + std::to_string(j));
        }
    }
    Eigen::MatrixXd out(n, low.size());
    for (Eigen::Index j = 0; j < low.size(); ++j) {
        TentSequence chain(rng.split(static_cast<std::uint64_t>(j)));
        const double width = high(j) - low(j);
        for (Eigen::Index i = 0; i < n; ++i) {
            out(i, j) = low(j) + chain.next() * width;
        }
    }
    return out;
}

void OUParams::validate() const
{
    if (!(theta >= 0.0) || !(sigma >= 0.0) || !(dt > 0.0) || length < 1 || !std::isfinite(mu)) {
        throw std::invalid_argument("OUParams: need theta >= 0, sigma >= 0, dt > 0, length >= 1");
    }
}

Eigen::VectorXd ou_path(const OUParams& p, RngStream& rng)
{
    return ou_path(p, p.mu, rng);
}

Eigen::VectorXd ou_path(const OUParams& p, double x0, RngStream& rng)
{
    p.validate();
    Eigen::VectorXd path(static_cast<Eigen::Index>(p.length));
    const double diffusion = p.sigma * std::sqrt(p.dt);
    double x = x0;
    path(0) = x;
    for (Eigen::Index k = 1; k < path.size(); ++k) {
        x += p.theta * (p.mu - x) * p.dt + diffusion * rng.normal();
        path(k) = x;
    }
    return path;
}

std::size_t ou_index(std::size_t t, std::size_t m, std::size_t c1, std::size_t t_max, std::size_t n)
{
    if (c1 == 0 || t_max == 0 || n == 0) {
        throw std::invalid_argument("ou_index: zero-sized path, horizon or population");
    }
    const auto num = static_cast<unsigned __int128>(t) * m * c1;
    const auto den = static_cast<unsigned __int128>(t_max) * n;
    const auto idx = num / den;
    return idx >= c1 ? c1 - 1 : static_cast<std::size_t>(idx);
}

}  // namespace iwoa
