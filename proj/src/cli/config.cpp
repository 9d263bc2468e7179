#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "iwoa/benchmarks.hpp"
#include "iwoa/optimizer.hpp"

namespace iwoa::cli {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& source, const std::string& key, const std::string& what)
{
    throw UsageError(source + ": " + key + ": " + what);
}

struct Reader {
    const std::string& source;

    std::int64_t integer(const toml::node& n, const std::string& key) const
    {
        const auto v = n.value_exact<std::int64_t>();
        if (!v) {
            bad(source, key, "expected an integer");
        }
        return *v;
    }

    int small_int(const toml::node& n, const std::string& key) const
    {
        const std::int64_t v = integer(n, key);
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
            bad(source, key, "integer out of range");
        }
        return static_cast<int>(v);
    }

    double number(const toml::node& n, const std::string& key) const
    {
        if (const auto v = n.value_exact<double>()) {
            return *v;
        }
        if (const auto v = n.value_exact<std::int64_t>()) {
            return static_cast<double>(*v);
        }
        bad(source, key, "expected a number");
    }

    bool boolean(const toml::node& n, const std::string& key) const
    {
        const auto v = n.value_exact<bool>();
        if (!v) {
            bad(source, key, "expected true or false");
        }
        return *v;
    }

    std::string string(const toml::node& n, const std::string& key) const
    {
        const auto v = n.value_exact<std::string>();
        if (!v) {
            bad(source, key, "expected a string");
        }
        return *v;
    }

    template <typename F>
    auto list(const toml::node& n, const std::string& key, F&& element) const
    {
        const toml::array* a = n.as_array();
        if (!a) {
            bad(source, key, "expected an array");
        }
        std::vector<decltype(element(*a->get(0), key))> out;
        for (std::size_t i = 0; i < a->size(); ++i) {
            out.push_back(element(*a->get(i), key + "[" + std::to_string(i) + "]"));
        }
        return out;
    }

    const toml::table& table(const toml::node& n, const std::string& key) const
    {
        const toml::table* t = n.as_table();
        if (!t) {
            bad(source, key, "expected a table");
        }
        return *t;
    }
};

std::uint64_t to_seed(std::int64_t v, const std::string& source, const std::string& key)
{
    if (v < 0) {
        bad(source, key, "seed must be non-negative");
    }
    return static_cast<std::uint64_t>(v);
}

toml::table parse(const std::string& text, const std::string& source)
{
    try {
        return toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        const auto& where = e.source().begin;
        throw UsageError(source + ":" + std::to_string(where.line) + ":" + std::to_string(where.column) + ": " +
                         std::string(e.description()));
    }
}

std::string upper(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

Json surrogate_json(const thermal::SurrogateConfig& s)
{
    return {{"resistance_ohm", s.resistance_ohm}, {"mass_kg", s.mass_kg},         {"cp_pir", s.cp_pir},
            {"k0_w_per_k", s.k0_w_per_k},         {"ambient_k", s.ambient_k},     {"frequency_hz", s.frequency_hz},
            {"ode_dt_s", s.ode_dt_s},             {"constant_conductance", s.constant_conductance}};
}

std::string hashable(const Json& j) { return j.dump(); }

}  // namespace

Preset parse_preset(const std::string& name)
{
    if (name == "paper") {
        return Preset::paper;
    }
    if (name == "desk") {
        return Preset::desk;
    }
    throw UsageError("unknown preset '" + name + "' (expected paper or desk)");
}

const char* to_string(Preset p) { return p == Preset::paper ? "paper" : "desk"; }

ExperimentConfig preset_config(Preset p)
{
    ExperimentConfig cfg;
    cfg.preset = p;
    for (const auto& f : benchmark_registry()) {
        cfg.bench.functions.emplace_back(f.label);
    }
    cfg.bench.algorithms = {"GWO", "SSA", "WOA", "IWOA"};
    cfg.bench.population = 30;
    if (p == Preset::paper) {
        cfg.bench.dims = {10, 30, 50};
        cfg.bench.iterations = 1000;
        cfg.bench.runs = 30;
    } else {
        cfg.bench.dims = {30};
        cfg.bench.iterations = 300;
        cfg.bench.runs = 10;
    }
    cfg.gen_data.n = 4000;
    cfg.tune.population = 20;
    cfg.tune.iterations = 50;
    cfg.tune.test_fraction = 0.3;
    return cfg;
}

std::optional<Preset> preset_from_toml(const std::string& text, const std::string& source)
{
    const toml::table root = parse(text, source);
    if (const toml::node* n = root.get("preset")) {
        return parse_preset(Reader{source}.string(*n, "preset"));
    }
    return std::nullopt;
}

void apply_toml(ExperimentConfig& cfg, const std::string& text, const std::string& source)
{
    const toml::table root = parse(text, source);
    const Reader r{source};
    for (const auto& [k, node] : root) {
        const std::string key(k.str());
        if (key == "preset") {
            continue;
        }
        if (key == "seed") {
            cfg.seed = to_seed(r.integer(node, key), source, key);
        } else if (key == "out_dir") {
            cfg.out_dir = r.string(node, key);
        } else if (key == "bench") {
            for (const auto& [sk, v] : r.table(node, key)) {
                const std::string name = key + "." + std::string(sk.str());
                const std::string_view s = sk.str();
                if (s == "functions") {
                    cfg.bench.functions = r.list(v, name, [&](const toml::node& e, const std::string& n) {
                        return upper(r.string(e, n));
                    });
                } else if (s == "dims") {
                    cfg.bench.dims = r.list(v, name, [&](const toml::node& e, const std::string& n) {
                        return r.small_int(e, n);
                    });
                } else if (s == "algorithms") {
                    cfg.bench.algorithms = r.list(v, name, [&](const toml::node& e, const std::string& n) {
                        return upper(r.string(e, n));
                    });
                } else if (s == "population") {
                    cfg.bench.population = r.small_int(v, name);
                } else if (s == "iterations") {
                    cfg.bench.iterations = r.small_int(v, name);
                } else if (s == "runs") {
                    cfg.bench.runs = r.small_int(v, name);
                } else if (s == "threads") {
                    cfg.bench.threads = r.small_int(v, name);
                } else {
                    bad(source, name, "unknown key");
                }
            }
        } else if (key == "surrogate") {
            auto& g = cfg.gen_data;
            for (const auto& [sk, v] : r.table(node, key)) {
                const std::string name = key + "." + std::string(sk.str());
                const std::string_view s = sk.str();
                if (s == "n") {
                    g.n = r.small_int(v, name);
                } else if (s == "name") {
                    g.name = r.string(v, name);
                } else if (s == "resistance_ohm") {
                    g.surrogate.resistance_ohm = r.number(v, name);
                } else if (s == "mass_kg") {
                    g.surrogate.mass_kg = r.number(v, name);
                } else if (s == "cp_pir") {
                    g.surrogate.cp_pir = r.number(v, name);
                } else if (s == "k0_w_per_k") {
                    g.surrogate.k0_w_per_k = r.number(v, name);
                } else if (s == "ambient_k") {
                    g.surrogate.ambient_k = r.number(v, name);
                } else if (s == "frequency_hz") {
                    g.surrogate.frequency_hz = r.number(v, name);
                } else if (s == "ode_dt_s") {
                    g.surrogate.ode_dt_s = r.number(v, name);
                } else if (s == "constant_conductance") {
                    g.surrogate.constant_conductance = r.boolean(v, name);
                } else {
                    bad(source, name, "unknown key");
                }
            }
        } else if (key == "tune") {
            auto& t = cfg.tune;
            for (const auto& [sk, v] : r.table(node, key)) {
                const std::string name = key + "." + std::string(sk.str());
                const std::string_view s = sk.str();
                if (s == "dataset") {
                    t.dataset = r.string(v, name);
                } else if (s == "algorithm") {
                    t.algorithm = r.string(v, name);
                } else if (s == "population") {
                    t.population = r.small_int(v, name);
                } else if (s == "iterations") {
                    t.iterations = r.small_int(v, name);
                } else if (s == "test_fraction") {
                    t.test_fraction = r.number(v, name);
                } else if (s == "split_seed") {
                    t.split_seed = to_seed(r.integer(v, name), source, name);
                } else if (s == "folds") {
                    t.options.folds = r.small_int(v, name);
                } else if (s == "epsilon") {
                    t.options.epsilon = r.number(v, name);
                } else if (s == "log10_c_low") {
                    t.options.log10_c_low = r.number(v, name);
                } else if (s == "log10_c_high") {
                    t.options.log10_c_high = r.number(v, name);
                } else if (s == "log10_gamma_low") {
                    t.options.log10_gamma_low = r.number(v, name);
                } else if (s == "log10_gamma_high") {
                    t.options.log10_gamma_high = r.number(v, name);
                } else if (s == "kkt_tolerance") {
                    t.options.solver.tolerance = r.number(v, name);
                } else if (s == "solver_max_iterations") {
                    t.options.solver.max_iterations = r.integer(v, name);
                } else if (s == "prune_threshold") {
                    t.options.solver.prune_threshold = r.number(v, name);
                } else if (s == "refit_attempts") {
                    t.options.refit_attempts = r.small_int(v, name);
                } else {
                    bad(source, name, "unknown key");
                }
            }
        } else if (key == "eval") {
            for (const auto& [sk, v] : r.table(node, key)) {
                const std::string name = key + "." + std::string(sk.str());
                const std::string_view s = sk.str();
                if (s == "models") {
                    cfg.eval.models = r.list(v, name, [&](const toml::node& e, const std::string& n) {
                        return r.string(e, n);
                    });
                } else if (s == "dataset") {
                    cfg.eval.dataset = r.string(v, name);
                } else if (s == "bands") {
                    cfg.eval.bands = r.list(v, name, [&](const toml::node& e, const std::string& n) {
                        return r.number(e, n);
                    });
                } else {
                    bad(source, name, "unknown key");
                }
            }
        } else if (key == "predict") {
            for (const auto& [sk, v] : r.table(node, key)) {
                const std::string name = key + "." + std::string(sk.str());
                const std::string_view s = sk.str();
                if (s == "model") {
                    cfg.predict.model = r.string(v, name);
                } else if (s == "scenario") {
                    cfg.predict.scenario = r.string(v, name);
                } else {
                    bad(source, name, "unknown key");
                }
            }
        } else {
            bad(source, key, "unknown key");
        }
    }
}

void validate(const ExperimentConfig& cfg)
{
    const auto need = [](bool ok, const std::string& what) {
        if (!ok) {
            throw UsageError(what);
        }
    };
    const auto& b = cfg.bench;
    need(!b.functions.empty(), "bench.functions must not be empty");
    for (const auto& f : b.functions) {
        try {
            (void)benchmark(f);
        } catch (const std::invalid_argument&) {
            throw UsageError("unknown benchmark function '" + f + "' (expected F1..F7)");
        }
    }
    need(!b.dims.empty(), "bench.dims must not be empty");
    for (const int d : b.dims) {
        need(d >= 1, "bench.dims entries must be >= 1");
    }
    need(!b.algorithms.empty(), "bench.algorithms must not be empty");
    for (const auto& a : b.algorithms) {
        try {
            (void)parse_algorithm(a);
        } catch (const std::invalid_argument&) {
            throw UsageError("unknown algorithm '" + a + "' (expected GWO, SSA, WOA or IWOA)");
        }
    }
    need(b.population >= 2, "bench.population must be >= 2");
    need(b.iterations >= 1, "bench.iterations must be >= 1");
    need(b.runs >= 1, "bench.runs must be >= 1");
    need(b.threads >= 1, "bench.threads must be >= 1");

    need(cfg.gen_data.n >= 1, "surrogate.n must be >= 1");
    need(!cfg.gen_data.name.empty() && cfg.gen_data.name.find('/') == std::string::npos,
         "surrogate.name must be a plain file stem");
    try {
        cfg.gen_data.surrogate.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const auto& t = cfg.tune;
    try {
        (void)parse_algorithm(t.algorithm);
    } catch (const std::invalid_argument&) {
        throw UsageError("unknown tuning algorithm '" + t.algorithm + "'");
    }
    need(t.population >= 2, "tune.population must be >= 2");
    need(t.iterations >= 1, "tune.iterations must be >= 1");
    need(t.test_fraction > 0.0 && t.test_fraction < 1.0, "tune.test_fraction must lie in (0, 1)");
    need(t.options.folds >= 2, "tune.folds must be >= 2");
    need(t.options.epsilon >= 0.0 && std::isfinite(t.options.epsilon), "tune.epsilon must be >= 0");
    need(t.options.log10_c_low < t.options.log10_c_high, "tune.log10_c_low must be below log10_c_high");
    need(t.options.log10_gamma_low < t.options.log10_gamma_high,
         "tune.log10_gamma_low must be below log10_gamma_high");
    need(t.options.solver.tolerance > 0.0, "tune.kkt_tolerance must be positive");
    need(t.options.solver.max_iterations >= 1, "tune.solver_max_iterations must be >= 1");
    need(t.options.solver.prune_threshold >= 0.0, "tune.prune_threshold must be >= 0");
    need(t.options.refit_attempts >= 1, "tune.refit_attempts must be >= 1");

    need(!cfg.eval.bands.empty(), "eval.bands must not be empty");
    for (const double band : cfg.eval.bands) {
        need(band > 0.0 && std::isfinite(band), "eval.bands entries must be positive");
    }
}

std::string canonical_bench(const ExperimentConfig& cfg)
{
    const auto& b = cfg.bench;
    const Json j = {{"command", "bench"},       {"functions", b.functions},   {"dims", b.dims},
                    {"algorithms", b.algorithms}, {"population", b.population}, {"iterations", b.iterations},
                    {"runs", b.runs}};
    return hashable(j);
}

std::string canonical_gen_data(const ExperimentConfig& cfg)
{
    const Json j = {{"command", "gen-data"},
                    {"n", cfg.gen_data.n},
                    {"name", cfg.gen_data.name},
                    {"surrogate", surrogate_json(cfg.gen_data.surrogate)}};
    return hashable(j);
}

std::string canonical_tune(const ExperimentConfig& cfg, const std::string& dataset_hash)
{
    const auto& t = cfg.tune;
    const auto& o = t.options;
    const Json j = {{"command", "tune"},
                    {"dataset_hash", dataset_hash},
                    {"algorithm", upper(t.algorithm)},
                    {"population", t.population},
                    {"iterations", t.iterations},
                    {"test_fraction", t.test_fraction},
                    {"split_seed", t.split_seed ? Json(*t.split_seed) : Json(nullptr)},
                    {"folds", o.folds},
                    {"epsilon", o.epsilon},
                    {"log10_c", {o.log10_c_low, o.log10_c_high}},
                    {"log10_gamma", {o.log10_gamma_low, o.log10_gamma_high}},
                    {"kkt_tolerance", o.solver.tolerance},
                    {"solver_max_iterations", o.solver.max_iterations},
                    {"prune_threshold", o.solver.prune_threshold},
                    {"refit_attempts", o.refit_attempts}};
    return hashable(j);
}

std::string canonical_eval(const ExperimentConfig& cfg, const std::vector<std::string>& input_hashes)
{
    const Json j = {{"command", "eval"}, {"inputs", input_hashes}, {"bands", cfg.eval.bands}};
    return hashable(j);
}

}  // namespace iwoa::cli
