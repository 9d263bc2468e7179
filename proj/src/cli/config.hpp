#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iwoa/svr.hpp"
#include "iwoa/thermal.hpp"

namespace iwoa::cli {

/// Bad flags, bad config values or an output conflict (exit 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation produced no usable numbers (exit 4).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Preset { paper, desk };

struct BenchConfig {
    std::vector<std::string> functions;
    std::vector<int> dims;
    std::vector<std::string> algorithms;
    int population = 30;
    int iterations = 1000;
    int runs = 30;
    int threads = 1;
};

struct GenDataConfig {
    int n = 4000;
    std::string name = "dataset";
    thermal::SurrogateConfig surrogate;
};

struct TuneConfig {
    std::string dataset;  // empty: <out_dir>/dataset.csv
    std::string algorithm = "iwoa";
    int population = 20;
    int iterations = 50;
    double test_fraction = 0.3;
    std::optional<std::uint64_t> split_seed;  // defaults to the master seed
    TuneOptions options;
};

struct EvalConfig {
    std::vector<std::string> models;  // empty: <out_dir>/model_iwoa.json
    std::string dataset;              // empty: <out_dir>/dataset.csv
    std::vector<double> bands{1.0, 2.0, 3.0, 4.0};
};

struct PredictConfig {
    std::string model;  // empty: <out_dir>/model_iwoa.json
    std::string scenario;
};

struct ExperimentConfig {
    Preset preset = Preset::paper;
    std::uint64_t seed = 42;
    std::string out_dir = "out";
    bool overwrite = false;
    BenchConfig bench;
    GenDataConfig gen_data;
    TuneConfig tune;
    EvalConfig eval;
    PredictConfig predict;
};

Preset parse_preset(const std::string& name);
const char* to_string(Preset p);

/// Every constant pinned by the preset.
ExperimentConfig preset_config(Preset p);

/// Overlays a TOML document onto cfg. Unknown keys and wrong types are
/// UsageErrors naming the key. A top-level `preset` key is ignored here;
/// read it with preset_from_toml first.
void apply_toml(ExperimentConfig& cfg, const std::string& text, const std::string& source);
std::optional<Preset> preset_from_toml(const std::string& text, const std::string& source);

/// Throws UsageError on any out-of-range value.
void validate(const ExperimentConfig& cfg);

/// Canonical JSON of the settings that shape a command's outputs (the
/// master seed, output directory and overwrite flag are excluded).
std::string canonical_bench(const ExperimentConfig& cfg);
std::string canonical_gen_data(const ExperimentConfig& cfg);
std::string canonical_tune(const ExperimentConfig& cfg, const std::string& dataset_hash);
std::string canonical_eval(const ExperimentConfig& cfg, const std::vector<std::string>& input_hashes);

}  // namespace iwoa::cli
