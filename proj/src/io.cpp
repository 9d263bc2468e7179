#include "iwoa/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

namespace iwoa::io {

using Json = nlohmann::ordered_json;

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool parse_double(std::string_view text, double& out)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    if (text.empty()) {
        return false;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k) {
        out[static_cast<std::size_t>(k)] = kDigits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::string Provenance::comment_line() const
{
    return "# iwoa " + tool_version + " config_hash=" + config_hash + " seed=" + std::to_string(seed);
}

std::string dataset_csv(const Dataset& data)
{
    data.validate();
    if (data.width() != 5) {
        throw std::invalid_argument("dataset_csv: expected 5 feature columns");
    }
    std::string out(kDatasetHeader);
    out += '\n';
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        for (Eigen::Index j = 0; j < data.width(); ++j) {
            out += format_double(data.features(i, j));
            out += ',';
        }
        out += format_double(data.targets(i));
        out += '\n';
    }
    return out;
}

Dataset parse_dataset_csv(std::string_view text, std::string_view source)
{
    const auto fail = [&](std::size_t line, const std::string& what) {
        throw DataError(std::string(source) + ":" + std::to_string(line) + ": " + what);
    };
    std::vector<std::array<double, 6>> rows;
    bool header_seen = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty() || line.front() == '#') {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        if (!header_seen) {
            if (line != kDatasetHeader) {
                fail(line_no, "expected header '" + std::string(kDatasetHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        std::array<double, 6> row{};
        std::size_t field = 0;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = std::min(line.find(',', start), line.size());
            if (field >= row.size()) {
                fail(line_no, "more than 6 fields");
            }
            const std::string_view cell = line.substr(start, comma - start);
            if (!parse_double(cell, row[field]) || !std::isfinite(row[field])) {
                fail(line_no, "field " + std::to_string(field + 1) + " is not a finite number: '" + std::string(cell) +
                                  "'");
            }
            ++field;
            if (comma == line.size()) {
                break;
            }
            start = comma + 1;
        }
        if (field != row.size()) {
            fail(line_no, "expected 6 fields, found " + std::to_string(field));
        }
        rows.push_back(row);
    }
    if (!header_seen) {
        fail(line_no, "missing header");
    }
    if (rows.empty()) {
        fail(line_no, "no data rows");
    }
    Dataset d;
    const auto n = static_cast<Eigen::Index>(rows.size());
    d.features.resize(n, 5);
    d.targets.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < 5; ++j) {
            d.features(i, j) = r[static_cast<std::size_t>(j)];
        }
        d.targets(i) = r[5];
    }
    d.metadata["target_unit"] = "K";
    return d;
}

std::string dataset_sidecar_json(const Dataset& data, const Provenance& prov, std::string_view csv_name,
                                 std::string_view csv_hash)
{
    Json j;
    j["tool_version"] = prov.tool_version;
    j["config_hash"] = prov.config_hash;
    j["seed"] = prov.seed;
    j["file"] = csv_name;
    j["file_hash_fnv1a64"] = csv_hash;
    j["n_samples"] = data.size();
    j["columns"] = Json::array({"I_A", "t1_ms", "t2_s", "omega_rad", "T0_K", "temperature_K"});
    Json meta = Json::object();
    for (const auto& [k, v] : data.metadata) {
        meta[k] = v;
    }
    j["metadata"] = meta;
    return j.dump(2) + "\n";
}

std::string film_properties_csv(const std::vector<thermal::LabeledSample>& samples, const Provenance& prov)
{
    std::string out = prov.comment_line() + "\nrow,peak_K,film_K,sf6_conductivity_W_per_mK,sf6_cp_J_per_kgK,sf6_viscosity_Pa_s\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        out += std::to_string(i) + "," + format_double(s.peak_k) + "," + format_double(s.film_k) + "," +
               format_double(s.sf6_conductivity) + "," + format_double(s.sf6_cp) + "," +
               format_double(s.sf6_viscosity) + "\n";
    }
    return out;
}

namespace {

Json vector_json(const Eigen::VectorXd& v)
{
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(v(i));
    }
    return a;
}

Eigen::VectorXd json_vector(const Json& a)
{
    if (!a.is_array()) {
        throw DataError("expected an array of numbers");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) {
            throw DataError("expected an array of numbers");
        }
        v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    }
    return v;
}

}  // namespace

std::string model_json(const ModelFile& file)
{
    const SvrModel& m = file.model;
    Json j;
    j["format_version"] = kModelFormatVersion;
    j["tool_version"] = file.provenance.tool_version;
    j["config_hash"] = file.provenance.config_hash;
    j["seed"] = file.provenance.seed;
    j["algorithm"] = file.algorithm;
    j["cv_mse"] = file.cv_mse;
    j["dataset_hash"] = file.dataset_hash;
    j["split"] = {{"test_fraction", file.test_fraction}, {"seed", file.split_seed}};
    j["ambient_K"] = file.ambient_k;
    j["params"] = {{"C", m.params.C}, {"epsilon", m.params.epsilon}, {"gamma", m.params.gamma}};
    j["scaler"] = {{"feature_mean", vector_json(m.scaler.feature_mean)},
                   {"feature_std", vector_json(m.scaler.feature_std)},
                   {"target_mean", m.scaler.target_mean},
                   {"target_std", m.scaler.target_std}};
    j["solver"] = {{"iterations", m.iterations}, {"violation", m.violation}};
    j["bias"] = m.bias;
    j["dual_coefs"] = vector_json(m.dual_coefs);
    Json sv = Json::array();
    for (Eigen::Index i = 0; i < m.support_vectors.rows(); ++i) {
        sv.push_back(vector_json(m.support_vectors.row(i).transpose()));
    }
    j["support_vectors"] = sv;
    return j.dump(1) + "\n";
}

ModelFile parse_model_json(std::string_view text, std::string_view source)
{
    const std::string where(source);
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        throw DataError(where + ": not a JSON document: " + e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion) {
            throw DataError(where + ": model format_version " + std::to_string(version) + ", expected " +
                            std::to_string(kModelFormatVersion));
        }
        ModelFile f;
        f.provenance.tool_version = j.at("tool_version").get<std::string>();
        f.provenance.config_hash = j.at("config_hash").get<std::string>();
        f.provenance.seed = j.at("seed").get<std::uint64_t>();
        f.algorithm = j.at("algorithm").get<std::string>();
        f.cv_mse = j.at("cv_mse").get<double>();
        f.dataset_hash = j.at("dataset_hash").get<std::string>();
        f.test_fraction = j.at("split").at("test_fraction").get<double>();
        f.split_seed = j.at("split").at("seed").get<std::uint64_t>();
        f.ambient_k = j.at("ambient_K").get<double>();
        SvrModel& m = f.model;
        m.params.C = j.at("params").at("C").get<double>();
        m.params.epsilon = j.at("params").at("epsilon").get<double>();
        m.params.gamma = j.at("params").at("gamma").get<double>();
        m.scaler.feature_mean = json_vector(j.at("scaler").at("feature_mean"));
        m.scaler.feature_std = json_vector(j.at("scaler").at("feature_std"));
        m.scaler.target_mean = j.at("scaler").at("target_mean").get<double>();
        m.scaler.target_std = j.at("scaler").at("target_std").get<double>();
        m.iterations = j.at("solver").at("iterations").get<long>();
        m.violation = j.at("solver").at("violation").get<double>();
        m.bias = j.at("bias").get<double>();
        m.dual_coefs = json_vector(j.at("dual_coefs"));
        const Json& sv = j.at("support_vectors");
        const auto width = m.scaler.feature_mean.size();
        if (!sv.is_array() || static_cast<Eigen::Index>(sv.size()) != m.dual_coefs.size() ||
            m.scaler.feature_std.size() != width) {
            throw DataError(where + ": support vector, coefficient and scaler sizes disagree");
        }
        m.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), width);
        for (std::size_t i = 0; i < sv.size(); ++i) {
            const Eigen::VectorXd row = json_vector(sv[i]);
            if (row.size() != width) {
                throw DataError(where + ": support vector " + std::to_string(i) + " has wrong width");
            }
            m.support_vectors.row(static_cast<Eigen::Index>(i)) = row.transpose();
        }
        m.params.validate();
        return f;
    } catch (const Json::exception& e) {
        throw DataError(where + ": malformed model document: " + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(where + ": " + e.what());
    }
}

std::string curve_csv(const std::vector<double>& curve, const Provenance& prov)
{
    std::string out = prov.comment_line() + "\niteration,best_fitness\n";
    for (std::size_t t = 0; t < curve.size(); ++t) {
        out += std::to_string(t + 1) + "," + format_double(curve[t]) + "\n";
    }
    return out;
}

std::string stats_csv(const std::vector<StatsRow>& rows, const Provenance& prov)
{
    std::string out = prov.comment_line() + "\nfunction,algorithm,dim,mean,std,best\n";
    for (const auto& r : rows) {
        out += r.function + "," + r.algorithm + "," + std::to_string(r.dim) + "," + format_double(r.stats.mean) + "," +
               format_double(r.stats.std_dev) + "," + format_double(r.stats.best) + "\n";
    }
    return out;
}

std::string eval_report_text(const EvalReport& report, std::string_view model_name, const Provenance& prov)
{
    std::string out = prov.comment_line() + "\n";
    const auto kv = [&out](std::string_view key, const std::string& value) {
        out += std::string(key) + " = " + value + "\n";
    };
    kv("model", std::string(model_name));
    kv("n_test", std::to_string(report.n_test));
    kv("r2", format_double(report.r2));
    kv("mse", format_double(report.mse));
    kv("mae", format_double(report.mae));
    for (const auto& [band, rate] : report.hit_rates) {
        kv("hit_rate_pm" + format_double(band) + "C", format_double(rate));
    }
    kv("n_above_100C", std::to_string(report.n_above_100c));
    for (const auto& [band, rate] : report.hit_rates_above_100c) {
        kv("hit_rate_above_100C_pm" + format_double(band) + "C", format_double(rate));
    }
    return out;
}

std::string eval_table_csv(const std::vector<std::pair<std::string, EvalReport>>& rows, const Provenance& prov)
{
    std::string out = prov.comment_line() + "\nmodel,R2,MSE,MAE\n";
    for (const auto& [name, r] : rows) {
        out += name + "," + format_double(r.r2) + "," + format_double(r.mse) + "," + format_double(r.mae) + "\n";
    }
    return out;
}

std::string hit_rate_csv(const EvalReport& report, const Provenance& prov)
{
    std::string out = prov.comment_line() + "\nband_C,hit_rate,hit_rate_above_100C\n";
    for (const auto& [band, rate] : report.hit_rates) {
        const auto above = report.hit_rates_above_100c.find(band);
        out += format_double(band) + "," + format_double(rate) + "," +
               (above == report.hit_rates_above_100c.end() ? std::string() : format_double(above->second)) + "\n";
    }
    return out;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(path.string() + ": cannot open for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw DataError(path.string() + ": read error");
    }
    return ss.str();
}

void OutputSet::add(std::filesystem::path path, std::string content)
{
    files_.emplace_back(std::move(path), std::move(content));
}

void check_outputs(const std::vector<std::filesystem::path>& paths, bool overwrite)
{
    if (overwrite) {
        return;
    }
    for (const auto& path : paths) {
        if (std::filesystem::exists(path)) {
            throw OutputExists(path.string() + " exists; pass --overwrite to replace it");
        }
    }
}

void OutputSet::commit(bool overwrite) const
{
    namespace fs = std::filesystem;
    std::vector<fs::path> paths;
    for (const auto& [path, content] : files_) {
        paths.push_back(path);
    }
    check_outputs(paths, overwrite);
    std::vector<fs::path> staged;
    const auto cleanup = [&staged] {
        for (const auto& p : staged) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    };
    for (const auto& [path, content] : files_) {
        std::error_code ec;
        if (path.has_parent_path()) {
            fs::create_directories(path.parent_path(), ec);
        }
        fs::path tmp = path;
        tmp += ".partial";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out) {
            staged.push_back(tmp);
            cleanup();
            throw DataError(path.string() + ": cannot write");
        }
        staged.push_back(tmp);
    }
    for (std::size_t k = 0; k < files_.size(); ++k) {
        std::error_code ec;
        fs::rename(staged[k], files_[k].first, ec);
        if (ec) {
            cleanup();
            throw DataError(files_[k].first.string() + ": cannot move into place: " + ec.message());
        }
    }
}

}  // namespace iwoa::io
