#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "iwoa/rand.hpp"
#include "iwoa/thermal.hpp"

using namespace iwoa;
using namespace iwoa::thermal;

namespace {

double naive_poly(std::initializer_list<double> coefs, double t)
{
    double s = 0.0;
    int p = 0;
    for (const double c : coefs) {
        s += c * std::pow(t, p++);
    }
    return s;
}

double naive_conductivity(double t)
{
    return naive_poly({4.37e-3, -5.78e-5, 4.79e-7, -9.19e-10, 8.18e-13, -2.82e-16}, t);
}
double naive_cp(double t) { return naive_poly({-218.4, 4.73, 7.50e-3, 5.67e-6, -1.66e-9}, t); }
double naive_viscosity(double t) { return naive_poly({2.88e-7, 5.51e-8, -1.68e-11, 1.39e-15}, t); }

// Composite Simpson rule for the Joule integral.
double simpson_energy(double i, double t1_ms, double omega, double r, double f)
{
    const int n = 20000;
    const double t1 = t1_ms * 1e-3;
    const double h = t1 / n;
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double v = std::sin(2.0 * std::numbers::pi * f * k * h + omega);
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        s += w * v * v;
    }
    return r * i * i * s * h / 3.0;
}

ScenarioInput scenario(double i, double t1, double t2, double omega, double t0)
{
    ScenarioInput s;
    s.current_a = i;
    s.insertion_ms = t1;
    s.cooling_s = t2;
    s.phase_rad = omega;
    s.initial_k = t0;
    return s;
}

ScenarioInput random_scenario(RngStream& rng)
{
    return scenario(rng.uniform(0, 1600), rng.uniform(7, 12), rng.uniform(0, 1800), rng.uniform(0, 6.28),
                    rng.uniform(293, 393));
}

}  // namespace

TEST_SUITE("thermal_surrogate")
{
    TEST_CASE("property polynomials at 300 K")
    {
        CHECK(std::abs(sf6_thermal_conductivity(300.0) - 0.011268) <= 1e-5);
        CHECK(std::abs(sf6_heat_capacity(300.0) - 2015.2) <= 0.5);
        CHECK(std::abs(sf6_viscosity(300.0) - 1.534e-5) <= 1e-7);
    }

    TEST_CASE("constant terms through the unchecked evaluators")
    {
        CHECK(sf6_thermal_conductivity_raw(0.0) == 4.37e-3);
        CHECK(sf6_heat_capacity_raw(0.0) == -218.4);
        CHECK(sf6_viscosity_raw(0.0) == 2.88e-7);
    }

    TEST_CASE("Horner and naive powers agree")
    {
        RngStream rng(400);
        CHECK(sf6_thermal_conductivity(400.0) == doctest::Approx(naive_conductivity(400.0)).epsilon(1e-12));
        for (int k = 0; k < 100; ++k) {
            const double t = rng.uniform(200.0, 500.0);
            CHECK(sf6_thermal_conductivity(t) == doctest::Approx(naive_conductivity(t)).epsilon(1e-12));
            CHECK(sf6_heat_capacity(t) == doctest::Approx(naive_cp(t)).epsilon(1e-12));
            CHECK(sf6_viscosity(t) == doctest::Approx(naive_viscosity(t)).epsilon(1e-12));
        }
    }

    TEST_CASE("property window")
    {
        CHECK_THROWS_AS(sf6_thermal_conductivity(199.9), std::domain_error);
        CHECK_THROWS_AS(sf6_heat_capacity(500.1), std::domain_error);
        CHECK_THROWS_AS(sf6_viscosity(0.0), std::domain_error);
        CHECK_NOTHROW(sf6_viscosity(200.0));
        CHECK_NOTHROW(sf6_viscosity(500.0));
        for (double t = 200.0; t <= 500.0; t += 0.5) {
            REQUIRE(sf6_viscosity(t) > 0.0);
            REQUIRE(sf6_thermal_conductivity(t) > 0.0);
            REQUIRE(sf6_heat_capacity(t) > 0.0);
        }
    }

    TEST_CASE("Joule energy examples")
    {
        CHECK(joule_energy(0.0, 10.0, 1.0, 500.0, 50.0) == 0.0);
        for (const double omega : {0.0, 0.7, 2.0, 5.5}) {
            CHECK(joule_energy(1000.0, 20.0, omega, 500.0, 50.0) ==
                  doctest::Approx(500.0 * 1e6 * 0.020 / 2.0).epsilon(1e-12));
        }
        CHECK(joule_energy(1600.0, 10.0, 0.0, 500.0, 50.0) == doctest::Approx(6.4e6).epsilon(1e-12));
        CHECK(simpson_energy(1600.0, 10.0, 0.0, 500.0, 50.0) == doctest::Approx(6.4e6).epsilon(1e-9));
        RngStream rng(1);
        for (int k = 0; k < 20; ++k) {
            const double i = rng.uniform(0, 1600);
            const double t1 = rng.uniform(7, 12);
            const double om = rng.uniform(0, 6.28);
            CHECK(joule_energy(i, t1, om, 500.0, 50.0) ==
                  doctest::Approx(simpson_energy(i, t1, om, 500.0, 50.0)).epsilon(1e-9));
        }
    }

    TEST_CASE("peak temperature examples")
    {
        const SurrogateConfig cfg;
        CHECK(peak_temperature(300.0, 0.0, cfg) == 300.0);
        CHECK(peak_temperature(300.0, cfg.heat_capacity(), cfg) == 301.0);
        CHECK(peak_temperature(300.0, 6.4e6, cfg) - 300.0 == doctest::Approx(59.93).epsilon(1e-4));
        CHECK_THROWS_AS(peak_temperature(300.0, -1.0, cfg), std::invalid_argument);
    }

    TEST_CASE("cooling examples")
    {
        SurrogateConfig cfg;
        CHECK(cool(380.0, 0.0, cfg) == 380.0);
        const double tau = cfg.heat_capacity() / cfg.k0_w_per_k;
        CHECK(std::abs(cool(393.0, 10.0 * tau, cfg) - cfg.ambient_k) <= 0.1);

        cfg.constant_conductance = true;
        for (const double t2 : {1.0, 60.5, 900.0, 1800.0}) {
            for (const double peak : {300.0, 352.9, 453.0}) {
                const double exact =
                    cfg.ambient_k + (peak - cfg.ambient_k) * std::exp(-cfg.k0_w_per_k * t2 / cfg.heat_capacity());
                CHECK(cool(peak, t2, cfg) == doctest::Approx(exact).epsilon(1e-6));
            }
        }
    }

    TEST_CASE("config validation")
    {
        SurrogateConfig cfg;
        cfg.ode_dt_s = 2.0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg = SurrogateConfig{};
        cfg.mass_kg = 0.0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        CHECK_THROWS_AS(scenario(1700, 10, 0, 0, 300).validate(), std::invalid_argument);
        CHECK_FALSE(scenario(100, 6, 0, 0, 300).in_range());
        CHECK(scenario(100, 7, 0, 0, 300).in_range());
    }

    TEST_CASE("simulate examples")
    {
        const SurrogateConfig cfg;
        for (const double t2 : {0.0, 10.0, 1800.0}) {
            CHECK(simulate(scenario(0, 10, t2, 1.0, 293), cfg).temperature_k == 293.0);
        }
        double prev = 394.0;
        for (double t2 = 0.0; t2 <= 1800.0; t2 += 100.0) {
            const double t = simulate(scenario(0, 10, t2, 0, 393), cfg).temperature_k;
            CHECK(t < prev);
            CHECK(t > 293.0);
            prev = t;
        }
    }

    TEST_CASE("monotone in current, initial temperature and cooling time")
    {
        const SurrogateConfig cfg;
        RngStream rng(50);
        for (int k = 0; k < 10; ++k) {
            const ScenarioInput base = random_scenario(rng);
            double prev = -1.0;
            for (double i = 0; i <= 1600; i += 100) {
                ScenarioInput s = base;
                s.current_a = i;
                const double t = simulate(s, cfg).temperature_k;
                CHECK(t >= prev);
                prev = t;
            }
            prev = -1.0;
            for (double t0 = 293; t0 <= 393; t0 += 10) {
                ScenarioInput s = base;
                s.initial_k = t0;
                const double t = simulate(s, cfg).temperature_k;
                CHECK(t >= prev);
                prev = t;
            }
            prev = 1e9;
            for (double t2 = 0; t2 <= 1800; t2 += 150) {
                ScenarioInput s = base;
                s.cooling_s = t2;
                const double t = simulate(s, cfg).temperature_k;
                CHECK(t <= prev);
                prev = t;
            }
        }
    }

    TEST_CASE("ambient and adiabatic bounds, energy sanity")
    {
        const SurrogateConfig cfg;
        RngStream rng(51);
        for (int k = 0; k < 500; ++k) {
            const ScenarioInput s = random_scenario(rng);
            const LabeledSample out = simulate(s, cfg);
            const double e = joule_energy(s.current_a, s.insertion_ms, s.phase_rad, cfg.resistance_ohm,
                                          cfg.frequency_hz);
            CHECK(out.temperature_k >= cfg.ambient_k);
            CHECK(out.temperature_k <= s.initial_k + e / cfg.heat_capacity() + 1e-12);
            ScenarioInput s0 = s;
            s0.cooling_s = 0.0;
            CHECK(simulate(s0, cfg).temperature_k - s.initial_k ==
                  doctest::Approx(e / cfg.heat_capacity()).epsilon(1e-12));
        }
    }

    TEST_CASE("phase angle matters except over a half period")
    {
        const SurrogateConfig cfg;
        const double ref = simulate(scenario(1200, 10, 600, 0.0, 320), cfg).temperature_k;
        for (const double omega : {0.5, 1.7, 3.0, 6.0}) {
            CHECK(simulate(scenario(1200, 10, 600, omega, 320), cfg).temperature_k ==
                  doctest::Approx(ref).epsilon(1e-12));
        }
        CHECK(simulate(scenario(1200, 7, 600, 0.0, 320), cfg).temperature_k !=
              doctest::Approx(simulate(scenario(1200, 7, 600, 1.0, 320), cfg).temperature_k).epsilon(1e-6));
    }

    TEST_CASE("halving the step changes outputs by less than 1e-4 K")
    {
        SurrogateConfig coarse;
        SurrogateConfig fine;
        fine.ode_dt_s = coarse.ode_dt_s / 2.0;
        RngStream rng(52);
        double worst = 0.0;
        for (int k = 0; k < 200; ++k) {
            const ScenarioInput s = random_scenario(rng);
            worst = std::max(worst, std::abs(simulate(s, coarse).temperature_k - simulate(s, fine).temperature_k));
        }
        CHECK(worst < 1e-4);
    }

    TEST_CASE("table row plausibility")
    {
        const SurrogateConfig cfg;
        const ScenarioInput s = scenario(500.33, 10.82, 1259.97, 0.49, 331.63);
        const LabeledSample out = simulate(s, cfg);
        ScenarioInput cold = s;
        cold.current_a = 0.0;
        CHECK(out.temperature_k > simulate(cold, cfg).temperature_k);
        CHECK(out.temperature_k <= out.peak_k);
        MESSAGE("surrogate for the published row: " << out.temperature_k << " K (reference simulation 355.62 K)");
    }

    TEST_CASE("generated datasets are in range and reproducible")
    {
        const SurrogateConfig cfg;
        const Dataset a = generate_dataset(300, cfg, 17);
        const Dataset b = generate_dataset(300, cfg, 17);
        const Dataset c = generate_dataset(300, cfg, 18);
        REQUIRE(a.size() == 300);
        REQUIRE(a.width() == 5);
        CHECK(a.features == b.features);
        CHECK(a.targets == b.targets);
        CHECK(a.metadata == b.metadata);
        CHECK(a.features != c.features);
        for (Eigen::Index j = 0; j < 5; ++j) {
            CHECK(a.features.col(j).minCoeff() >= kFactorRanges[static_cast<std::size_t>(j)].low);
            CHECK(a.features.col(j).maxCoeff() <= kFactorRanges[static_cast<std::size_t>(j)].high);
        }
        CHECK(a.metadata.count("seed") == 1);
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            const ScenarioInput s = scenario(a.features(i, 0), a.features(i, 1), a.features(i, 2),
                                             a.features(i, 3), a.features(i, 4));
            CHECK(a.targets(i) == simulate(s, cfg).temperature_k);
        }
    }
}
