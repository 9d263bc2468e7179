#include "iwoa/thermal.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "iwoa/rand.hpp"

namespace iwoa::thermal {

namespace {

constexpr std::array<double, 6> kConductivity{4.37e-3, -5.78e-5, 4.79e-7, -9.19e-10, 8.18e-13, -2.82e-16};
constexpr std::array<double, 5> kHeatCapacity{-218.4, 4.73, 7.50e-3, 5.67e-6, -1.66e-9};
constexpr std::array<double, 4> kViscosity{2.88e-7, 5.51e-8, -1.68e-11, 1.39e-15};

template <std::size_t N>
double horner(const std::array<double, N>& c, double x) noexcept
{
    double acc = c[N - 1];
    for (std::size_t k = N - 1; k-- > 0;) {
        acc = acc * x + c[k];
    }
    return acc;
}

void check_window(double t_k, const char* what)
{
    if (!(t_k >= kPropertyLowK && t_k <= kPropertyHighK)) {
        throw std::domain_error(std::string(what) + ": temperature " + std::to_string(t_k) +
                                " K outside [200, 500] K");
    }
}

std::string fmt(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

bool ScenarioInput::in_range() const noexcept
{
    const std::array<double, 5> v{current_a, insertion_ms, cooling_s, phase_rad, initial_k};
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!(v[k] >= kFactorRanges[k].low && v[k] <= kFactorRanges[k].high)) {
            return false;
        }
    }
    return true;
}

void ScenarioInput::validate() const
{
    if (!in_range()) {
        throw std::invalid_argument("ScenarioInput: factor outside sampling ranges");
    }
}

void SurrogateConfig::validate() const
{
    if (!(resistance_ohm > 0.0 && mass_kg > 0.0 && cp_pir > 0.0 && k0_w_per_k > 0.0 && ambient_k > 0.0 &&
          frequency_hz > 0.0 && ode_dt_s > 0.0 && ode_dt_s <= 1.0)) {
        throw std::invalid_argument("SurrogateConfig: all parameters must be positive and ode_dt <= 1 s");
    }
}

double sf6_thermal_conductivity_raw(double t_k) noexcept { return horner(kConductivity, t_k); }
double sf6_heat_capacity_raw(double t_k) noexcept { return horner(kHeatCapacity, t_k); }
double sf6_viscosity_raw(double t_k) noexcept { return horner(kViscosity, t_k); }

double sf6_thermal_conductivity(double t_k)
{
    check_window(t_k, "sf6_thermal_conductivity");
    return sf6_thermal_conductivity_raw(t_k);
}

double sf6_heat_capacity(double t_k)
{
    check_window(t_k, "sf6_heat_capacity");
    return sf6_heat_capacity_raw(t_k);
}

double sf6_viscosity(double t_k)
{
    check_window(t_k, "sf6_viscosity");
    return sf6_viscosity_raw(t_k);
}

double joule_energy(double current_a, double insertion_ms, double phase_rad, double resistance_ohm,
                    double frequency_hz)
{
    const double w = 2.0 * std::numbers::pi * frequency_hz;
    const double t1 = insertion_ms * 1e-3;
    // integral of sin^2(w t + phi) = t / 2 - (sin(2 (w t + phi)) - sin(2 phi)) / (4 w)
    const double integral = t1 / 2.0 - (std::sin(2.0 * (w * t1 + phase_rad)) - std::sin(2.0 * phase_rad)) / (4.0 * w);
    return resistance_ohm * current_a * current_a * integral;
}

double peak_temperature(double initial_k, double energy_j, const SurrogateConfig& cfg)
{
    if (energy_j < 0.0) {
        throw std::invalid_argument("peak_temperature: negative energy");
    }
    return initial_k + energy_j / cfg.heat_capacity();
}

double cool(double peak_k, double cooling_s, const SurrogateConfig& cfg)
{
    cfg.validate();
    if (cooling_s < 0.0) {
        throw std::invalid_argument("cool: negative cooling time");
    }
    const double amb = cfg.ambient_k;
    const double lambda_ref = sf6_thermal_conductivity_raw(300.0);
    const double inv_capacity = 1.0 / cfg.heat_capacity();
    const auto rate = [&](double temp) {
        const double ratio =
            cfg.constant_conductance ? 1.0 : sf6_thermal_conductivity((temp + amb) / 2.0) / lambda_ref;
        return -cfg.k0_w_per_k * ratio * (temp - amb) * inv_capacity;
    };

    double temp = peak_k;
    double elapsed = 0.0;
    while (elapsed < cooling_s) {
        const double h = std::min(cfg.ode_dt_s, cooling_s - elapsed);
        const double k1 = rate(temp);
        const double k2 = rate(temp + 0.5 * h * k1);
        const double k3 = rate(temp + 0.5 * h * k2);
        const double k4 = rate(temp + h * k3);
        temp += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        elapsed += h;
        // Guards the loop against a remainder below the float spacing of elapsed.
        if (cooling_s - elapsed < 1e-12 * std::max(1.0, cooling_s)) {
            break;
        }
    }
    return temp;
}

LabeledSample simulate(const ScenarioInput& scenario, const SurrogateConfig& cfg)
{
    cfg.validate();
    if (scenario.current_a < 0.0 || scenario.insertion_ms < 0.0 || scenario.cooling_s < 0.0) {
        throw std::invalid_argument("simulate: negative current or duration");
    }
    LabeledSample out;
    out.scenario = scenario;
    const double e = joule_energy(scenario.current_a, scenario.insertion_ms, scenario.phase_rad, cfg.resistance_ohm,
                                  cfg.frequency_hz);
    out.peak_k = peak_temperature(scenario.initial_k, e, cfg);
    out.temperature_k = cool(out.peak_k, scenario.cooling_s, cfg);
    out.film_k = (out.temperature_k + cfg.ambient_k) / 2.0;
    out.sf6_conductivity = sf6_thermal_conductivity(out.film_k);
    out.sf6_cp = sf6_heat_capacity(out.film_k);
    out.sf6_viscosity = sf6_viscosity(out.film_k);
    return out;
}

std::vector<LabeledSample> generate_samples(int n, const SurrogateConfig& cfg, std::uint64_t seed)
{
    if (n < 1) {
        throw std::invalid_argument("generate_samples: n must be at least 1");
    }
    cfg.validate();
    Eigen::VectorXd low(5);
    Eigen::VectorXd high(5);
    for (std::size_t k = 0; k < kFactorRanges.size(); ++k) {
        low(static_cast<Eigen::Index>(k)) = kFactorRanges[k].low;
        high(static_cast<Eigen::Index>(k)) = kFactorRanges[k].high;
    }
    const Eigen::MatrixXd x = tent_init(n, low, high, RngStream(seed).split("scenarios"));
    std::vector<LabeledSample> out;
    out.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        out.push_back(simulate(ScenarioInput{x(i, 0), x(i, 1), x(i, 2), x(i, 3), x(i, 4)}, cfg));
    }
    return out;
}

Dataset to_dataset(const std::vector<LabeledSample>& samples)
{
    Dataset d;
    const auto n = static_cast<Eigen::Index>(samples.size());
    d.features.resize(n, 5);
    d.targets.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = samples[static_cast<std::size_t>(i)];
        d.features.row(i) << s.scenario.current_a, s.scenario.insertion_ms, s.scenario.cooling_s,
            s.scenario.phase_rad, s.scenario.initial_k;
        d.targets(i) = s.temperature_k;
    }
    d.metadata["target_unit"] = "K";
    d.metadata["feature_order"] = "I_A,t1_ms,t2_s,omega_rad,T0_K";
    return d;
}

void stamp_metadata(Dataset& d, const SurrogateConfig& cfg, std::uint64_t seed)
{
    d.metadata["generator"] = kGeneratorVersion;
    d.metadata["seed"] = std::to_string(seed);
    d.metadata["resistance_ohm"] = fmt(cfg.resistance_ohm);
    d.metadata["mass_kg"] = fmt(cfg.mass_kg);
    d.metadata["cp_pir"] = fmt(cfg.cp_pir);
    d.metadata["k0_w_per_k"] = fmt(cfg.k0_w_per_k);
    d.metadata["ambient_k"] = fmt(cfg.ambient_k);
    d.metadata["frequency_hz"] = fmt(cfg.frequency_hz);
    d.metadata["ode_dt_s"] = fmt(cfg.ode_dt_s);
    d.metadata["constant_conductance"] = cfg.constant_conductance ? "true" : "false";
}

Dataset generate_dataset(int n, const SurrogateConfig& cfg, std::uint64_t seed)
{
    Dataset d = to_dataset(generate_samples(n, cfg, seed));
    stamp_metadata(d, cfg, seed);
    return d;
}

}  // namespace iwoa::thermal
