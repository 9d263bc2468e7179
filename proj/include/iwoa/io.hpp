#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "iwoa/dataset.hpp"
#include "iwoa/metrics.hpp"
#include "iwoa/optimizer.hpp"
#include "iwoa/svr.hpp"
#include "iwoa/thermal.hpp"

namespace iwoa::io {

/// Malformed or unreadable input file.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An output file already exists and overwriting was not requested.
class OutputExists : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest text that parses back to the same double ("inf", "nan" for
/// non-finite values).
std::string format_double(double v);
/// Strict parse of a whole field. Returns false on any trailing garbage.
bool parse_double(std::string_view text, double& out);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
/// 16 lowercase hex digits.
std::string hex64(std::uint64_t v);

/// Stamped into every artifact.
struct Provenance {
    std::string tool_version;
    std::string config_hash;
    std::uint64_t seed = 0;

    /// "# iwoa <version> config_hash=<hash> seed=<seed>"
    std::string comment_line() const;
};

inline constexpr std::string_view kDatasetHeader = "I_A,t1_ms,t2_s,omega_rad,T0_K,temperature_K";

std::string dataset_csv(const Dataset& data);
/// Parses dataset CSV text. Blank lines and lines starting with '#' are
/// skipped. Errors name the source and the 1-based line number.
Dataset parse_dataset_csv(std::string_view text, std::string_view source);

/// Sidecar metadata document for a dataset file.
std::string dataset_sidecar_json(const Dataset& data, const Provenance& prov, std::string_view csv_name,
                                 std::string_view csv_hash);

/// Film temperature and SF6 properties per sample, in dataset row order.
std::string film_properties_csv(const std::vector<thermal::LabeledSample>& samples, const Provenance& prov);

inline constexpr int kModelFormatVersion = 1;

/// A tuned model with what is needed to reproduce its evaluation split.
struct ModelFile {
    SvrModel model;
    std::string algorithm;
    double cv_mse = 0.0;
    std::string dataset_hash;
    double test_fraction = 0.3;
    std::uint64_t split_seed = 0;
    double ambient_k = 293.0;
    Provenance provenance;
};

std::string model_json(const ModelFile& file);
/// Throws DataError on malformed documents or a format_version mismatch.
ModelFile parse_model_json(std::string_view text, std::string_view source);

/// iteration,best_fitness with 1-based iterations.
std::string curve_csv(const std::vector<double>& curve, const Provenance& prov);

struct StatsRow {
    std::string function;
    std::string algorithm;
    int dim = 0;
    RunStats stats;
};

/// function,algorithm,dim,mean,std,best
std::string stats_csv(const std::vector<StatsRow>& rows, const Provenance& prov);

/// Flat key = value document.
std::string eval_report_text(const EvalReport& report, std::string_view model_name, const Provenance& prov);
/// model,R2,MSE,MAE with one row per named report.
std::string eval_table_csv(const std::vector<std::pair<std::string, EvalReport>>& rows, const Provenance& prov);
/// band_C,hit_rate,hit_rate_above_100C ("" when no sample is above 100 C).
std::string hit_rate_csv(const EvalReport& report, const Provenance& prov);

std::string read_file(const std::filesystem::path& path);

/// Throws OutputExists for the first existing path unless overwrite is set.
/// Lets long commands fail before doing any work.
void check_outputs(const std::vector<std::filesystem::path>& paths, bool overwrite);

/// Collects outputs and writes them all or none. Existing targets are an
/// error unless overwrite is set; each file is written to a temporary
/// sibling and renamed into place.
class OutputSet {
public:
    void add(std::filesystem::path path, std::string content);
    /// Throws OutputExists before writing anything, or DataError on I/O
    /// failure after removing whatever was staged.
    void commit(bool overwrite) const;
    const std::vector<std::pair<std::filesystem::path, std::string>>& files() const noexcept { return files_; }

private:
    std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

}  // namespace iwoa::io
