#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "iwoa/dataset.hpp"

namespace iwoa::thermal {

/// One closing operation followed by a cooling interval.
struct ScenarioInput {
    double current_a = 0.0;       // I, A
    double insertion_ms = 7.0;    // t1, ms
    double cooling_s = 0.0;       // t2, s
    double phase_rad = 0.0;       // closing phase angle
    double initial_k = 293.0;     // T0, K

    /// True when every field is inside the sampling ranges.
    bool in_range() const noexcept;
    void validate() const;
};

struct FactorRange {
    const char* name;
    double low;
    double high;
};

/// Sampling ranges in ScenarioInput field order.
inline constexpr std::array<FactorRange, 5> kFactorRanges{{
    {"I_A", 0.0, 1600.0},
    {"t1_ms", 7.0, 12.0},
    {"t2_s", 0.0, 1800.0},
    {"omega_rad", 0.0, 6.28},
    {"T0_K", 293.0, 393.0},
}};

/// Lumped resistor-stack parameters.
struct SurrogateConfig {
    double resistance_ohm = 500.0;
    double mass_kg = 120.0;
    double cp_pir = 890.0;          // J/(kg K)
    double k0_w_per_k = 60.0;       // cooling conductance at a 300 K film
    double ambient_k = 293.0;
    double frequency_hz = 50.0;
    double ode_dt_s = 1.0;
    /// Pins k(T) to k0; used to check the integrator against the closed form.
    bool constant_conductance = false;

    void validate() const;
    double heat_capacity() const noexcept { return mass_kg * cp_pir; }
};

struct LabeledSample {
    ScenarioInput scenario;
    double peak_k = 0.0;
    double temperature_k = 0.0;
    /// Gas film temperature at the end of cooling and SF6 properties there.
    double film_k = 0.0;
    double sf6_conductivity = 0.0;
    double sf6_cp = 0.0;
    double sf6_viscosity = 0.0;
};

// SF6 property fits, valid on [200, 500] K. The checked forms throw
// std::domain_error outside the window; the raw forms evaluate anywhere.
inline constexpr double kPropertyLowK = 200.0;
inline constexpr double kPropertyHighK = 500.0;

double sf6_thermal_conductivity(double t_k);
double sf6_heat_capacity(double t_k);
double sf6_viscosity(double t_k);

double sf6_thermal_conductivity_raw(double t_k) noexcept;
double sf6_heat_capacity_raw(double t_k) noexcept;
double sf6_viscosity_raw(double t_k) noexcept;

/// R I^2 * integral_0^t1 sin^2(2 pi f t + omega) dt, closed form.
double joule_energy(double current_a, double insertion_ms, double phase_rad, double resistance_ohm,
                    double frequency_hz);

/// Adiabatic rise T0 + E / (m cp). Throws for E < 0.
double peak_temperature(double initial_k, double energy_j, const SurrogateConfig& cfg);

/// RK4 integration of dT/dt = -k(T) (T - T_amb) / (m cp) over t2 seconds,
/// k(T) = k0 * lambda(T_film) / lambda(300 K), T_film = (T + T_amb) / 2.
double cool(double peak_k, double cooling_s, const SurrogateConfig& cfg);

LabeledSample simulate(const ScenarioInput& scenario, const SurrogateConfig& cfg);

/// Tent-sampled scenarios over kFactorRanges, each labeled by simulate().
std::vector<LabeledSample> generate_samples(int n, const SurrogateConfig& cfg, std::uint64_t seed);

/// Same samples as a Dataset (features in I, t1, t2, omega, T0 order,
/// targets in K) with the configuration stamped into metadata.
Dataset generate_dataset(int n, const SurrogateConfig& cfg, std::uint64_t seed);

Dataset to_dataset(const std::vector<LabeledSample>& samples);
/// Records generator version, seed and every configuration value.
void stamp_metadata(Dataset& data, const SurrogateConfig& cfg, std::uint64_t seed);

inline constexpr const char* kGeneratorVersion = "lumped-rk4-1";

}  // namespace iwoa::thermal
