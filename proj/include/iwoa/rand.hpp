#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

namespace iwoa {

/// Counter-based SplitMix64 stream.
///
/// Draw k of a stream with seed s is mix64(s + k * 0x9e3779b97f4a7c15), so a
/// sequence is fully described by (seed, counter) and is portable across
/// platforms. Uniform doubles use the top 53 bits; normals use Box-Muller
/// over two uniforms so no standard-library distribution is involved.
///
/// A stream must not be shared between threads. Give each worker its own
/// child via split().
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) noexcept : seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t counter() const noexcept { return counter_; }

    std::uint64_t next_u64() noexcept;

    /// Uniform in [0, 1).
    double uniform() noexcept;
    double uniform(double low, double high) noexcept { return low + (high - low) * uniform(); }
    /// Standard normal.
    double normal() noexcept;
    /// Uniform integer in [0, n). n must be > 0.
    std::size_t index(std::size_t n) noexcept;

    /// Child streams; distinct labels give unrelated sequences. Splitting
    /// does not advance the parent.
    RngStream split(std::string_view label) const noexcept;
    RngStream split(std::uint64_t index) const noexcept;

    static std::uint64_t mix64(std::uint64_t z) noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

/// One step of the tent map on [0, 1]. Throws std::domain_error outside.
double tent_next(double x);

/// Tent-map orbit driven by a stream.
///
/// Seeds are odd multiples of 2^-53, the only doubles whose orbit does not
/// hit 0 or 0.5 early. The map loses one bit per step in binary floating
/// point (an orbit reaches 0 after 53 steps), so the chain is reseeded from
/// the stream every `reseed_period` steps; 32 keeps at least 21 bits alive.
class TentSequence {
public:
    static constexpr int kDefaultReseedPeriod = 32;

    explicit TentSequence(RngStream rng, int reseed_period = kDefaultReseedPeriod);

    double next();
    double current() const noexcept { return x_; }

private:
    void reseed();

    RngStream rng_;
    int period_;
    int steps_ = 0;
    double x_ = 0.0;
};

/// n x dim positions, coordinate (i, j) = low_j + x_i * (high_j - low_j)
/// where x_i walks a tent orbit private to dimension j.
Eigen::MatrixXd tent_init(Eigen::Index n, const Eigen::VectorXd& low, const Eigen::VectorXd& high,
                          const RngStream& rng);

/// Ornstein-Uhlenbeck parameters. Defaults give a stationary std of
/// sigma / sqrt(2 theta) = 0.08, so paths stay roughly within +-0.24, with
/// a correlation length of 1 / (theta dt) = 10 samples. theta * dt is kept
/// small because the Euler scheme inflates the stationary variance by
/// 1 / (1 - theta dt / 2).
struct OUParams {
    double theta = 0.1;
    double mu = 0.0;
    double sigma = 0.035777087639996635;  // 0.08 * sqrt(2 * 0.1)
    double dt = 1.0;
    std::size_t length = 1000;

    void validate() const;
};

/// Euler-Maruyama path starting at mu.
Eigen::VectorXd ou_path(const OUParams& p, RngStream& rng);
/// Same, starting from an explicit x0.
Eigen::VectorXd ou_path(const OUParams& p, double x0, RngStream& rng);

/// floor(t * m * c1 / (t_max * n)) clamped to [0, c1 - 1]. t and m are 1-based.
std::size_t ou_index(std::size_t t, std::size_t m, std::size_t c1, std::size_t t_max, std::size_t n);

}  // namespace iwoa
