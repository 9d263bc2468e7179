#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <ostream>

#include "iwoa/benchmarks.hpp"
#include "iwoa/io.hpp"
#include "iwoa/metrics.hpp"
#include "iwoa/optimizer.hpp"
#include "iwoa/rand.hpp"
#include "iwoa/svr.hpp"
#include "iwoa/thermal.hpp"
#include "iwoa/version.hpp"

namespace iwoa::cli {

namespace fs = std::filesystem;

namespace {

io::Provenance provenance(const ExperimentConfig& cfg, const std::string& canonical)
{
    return io::Provenance{kToolVersion, io::hex64(io::fnv1a64(canonical)), cfg.seed};
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string upper(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

fs::path or_default(const std::string& given, const fs::path& fallback) { return given.empty() ? fallback : fs::path(given); }

/// Lower median by best fitness; ties keep run order.
std::size_t median_run(const std::vector<RunResult>& runs)
{
    std::vector<std::size_t> order(runs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return runs[a].best_f < runs[b].best_f; });
    return order[(order.size() - 1) / 2];
}

struct LoadedDataset {
    Dataset data;
    std::string hash;
};

LoadedDataset load_dataset(const fs::path& path)
{
    const std::string text = io::read_file(path);
    LoadedDataset out{io::parse_dataset_csv(text, path.string()), io::hex64(io::fnv1a64(text))};
    try {
        out.data.validate();
    } catch (const std::invalid_argument& e) {
        throw io::DataError(path.string() + ": " + e.what());
    }
    return out;
}

}  // namespace

void cmd_bench(const ExperimentConfig& cfg, std::ostream& out)
{
    const auto& b = cfg.bench;
    const io::Provenance prov = provenance(cfg, canonical_bench(cfg));
    const fs::path dir(cfg.out_dir);
    const auto curve_path = [&](std::string_view label, int dim, const std::string& alg) {
        return dir / "curves" / (std::string(label) + "_d" + std::to_string(dim) + "_" + alg + ".csv");
    };
    std::vector<fs::path> planned{dir / "bench_stats.csv"};
    for (const auto& label : b.functions) {
        for (const int dim : b.dims) {
            for (const auto& alg_name : b.algorithms) {
                planned.push_back(curve_path(benchmark(label).label, dim, std::string(to_string(parse_algorithm(alg_name)))));
            }
        }
    }
    io::check_outputs(planned, cfg.overwrite);

    io::OutputSet outputs;
    std::vector<io::StatsRow> rows;
    out << "function,algorithm,dim,mean,std,best\n";
    for (const auto& label : b.functions) {
        const BenchmarkFunction& fn = benchmark(label);
        for (const int dim : b.dims) {
            const Problem problem = make_problem(fn, dim);
            // Shared by every algorithm so comparisons use identical run seeds.
            const std::uint64_t combo_seed =
                RngStream(cfg.seed).split(label).split(static_cast<std::uint64_t>(dim)).seed();
            for (const auto& alg_name : b.algorithms) {
                OptimizerConfig oc;
                oc.algorithm = parse_algorithm(alg_name);
                oc.population = b.population;
                oc.max_iterations = b.iterations;
                const RepeatedRuns rr = run_repeated(problem, oc, b.runs, combo_seed, b.threads);
                const std::string alg(to_string(oc.algorithm));
                io::StatsRow row{std::string(fn.label), alg, dim, rr.stats};
                out << row.function << "," << alg << "," << dim << "," << io::format_double(rr.stats.mean) << ","
                    << io::format_double(rr.stats.std_dev) << "," << io::format_double(rr.stats.best) << "\n";
                rows.push_back(row);
                const auto& median = rr.runs[median_run(rr.runs)];
                outputs.add(curve_path(fn.label, dim, alg), io::curve_csv(median.curve, prov));
            }
        }
    }
    outputs.add(dir / "bench_stats.csv", io::stats_csv(rows, prov));
    outputs.commit(cfg.overwrite);
}

void cmd_gen_data(const ExperimentConfig& cfg, std::ostream& out)
{
    const auto& g = cfg.gen_data;
    const io::Provenance prov = provenance(cfg, canonical_gen_data(cfg));
    const auto samples = thermal::generate_samples(g.n, g.surrogate, cfg.seed);
    Dataset data = thermal::to_dataset(samples);
    thermal::stamp_metadata(data, g.surrogate, cfg.seed);
    data.metadata["tool_version"] = kToolVersion;

    const std::string csv = io::dataset_csv(data);
    const std::string csv_hash = io::hex64(io::fnv1a64(csv));
    const fs::path dir(cfg.out_dir);
    const std::string csv_name = g.name + ".csv";
    io::OutputSet outputs;
    outputs.add(dir / csv_name, csv);
    outputs.add(dir / (g.name + ".meta.json"), io::dataset_sidecar_json(data, prov, csv_name, csv_hash));
    outputs.add(dir / (g.name + ".film.csv"), io::film_properties_csv(samples, prov));
    outputs.commit(cfg.overwrite);

    out << "samples = " << data.size() << "\n"
        << "dataset = " << (dir / csv_name).string() << "\n"
        << "dataset_hash = " << csv_hash << "\n"
        << "temperature_K_min = " << io::format_double(data.targets.minCoeff()) << "\n"
        << "temperature_K_max = " << io::format_double(data.targets.maxCoeff()) << "\n";
}

void cmd_tune(const ExperimentConfig& cfg, std::ostream& out)
{
    const auto& t = cfg.tune;
    const fs::path dir(cfg.out_dir);
    const fs::path dataset_path = or_default(t.dataset, dir / "dataset.csv");
    const LoadedDataset loaded = load_dataset(dataset_path);
    const io::Provenance prov = provenance(cfg, canonical_tune(cfg, loaded.hash));

    const std::string stem = lower(std::string(to_string(parse_algorithm(t.algorithm))));
    const fs::path model_path = dir / ("model_" + stem + ".json");
    const fs::path curve_path = dir / ("tune_" + stem + "_curve.csv");
    io::check_outputs({model_path, curve_path}, cfg.overwrite);

    const std::uint64_t split_seed = t.split_seed.value_or(cfg.seed);
    Dataset train;
    try {
        train = split(loaded.data, t.test_fraction, split_seed).first;
    } catch (const std::invalid_argument& e) {
        throw io::DataError(dataset_path.string() + ": " + e.what());
    }

    OptimizerConfig budget;
    budget.algorithm = parse_algorithm(t.algorithm);
    budget.population = t.population;
    budget.max_iterations = t.iterations;
    const std::string alg(to_string(budget.algorithm));

    TuneResult result;
    try {
        result = tune_svr(train, budget.algorithm, budget, RngStream(cfg.seed).split("tune").seed(), t.options);
    } catch (const SvrConvergenceError& e) {
        throw NumericalError(std::string("tuning failed: ") + e.what());
    }

    io::ModelFile file;
    file.model = result.model;
    file.algorithm = alg;
    file.cv_mse = result.cv_mse;
    file.dataset_hash = loaded.hash;
    file.test_fraction = t.test_fraction;
    file.split_seed = split_seed;
    if (const auto it = loaded.data.metadata.find("ambient_k"); it != loaded.data.metadata.end()) {
        io::parse_double(it->second, file.ambient_k);
    }
    file.provenance = prov;

    io::OutputSet outputs;
    outputs.add(model_path, io::model_json(file));
    outputs.add(curve_path, io::curve_csv(result.run.curve, prov));
    outputs.commit(cfg.overwrite);

    out << "algorithm = " << alg << "\n"
        << "train_samples = " << train.size() << "\n"
        << "C = " << io::format_double(result.params.C) << "\n"
        << "gamma = " << io::format_double(result.params.gamma) << "\n"
        << "epsilon = " << io::format_double(result.params.epsilon) << "\n"
        << "cv_mse = " << io::format_double(result.cv_mse) << "\n"
        << "optimizer_best_cv_mse = " << io::format_double(result.run.best_f) << "\n"
        << "refit_rank = " << result.refit_rank << "\n"
        << "support_vectors = " << result.model.support_count() << "\n";
}

void cmd_eval(const ExperimentConfig& cfg, std::ostream& out)
{
    const fs::path dir(cfg.out_dir);
    std::vector<fs::path> model_paths;
    for (const auto& m : cfg.eval.models) {
        model_paths.emplace_back(m);
    }
    if (model_paths.empty()) {
        model_paths.push_back(dir / "model_iwoa.json");
    }
    const fs::path dataset_path = or_default(cfg.eval.dataset, dir / "dataset.csv");
    const LoadedDataset loaded = load_dataset(dataset_path);

    std::vector<std::string> hashes{loaded.hash};
    std::vector<std::pair<io::ModelFile, std::string>> models;
    for (const auto& path : model_paths) {
        const std::string text = io::read_file(path);
        hashes.push_back(io::hex64(io::fnv1a64(text)));
        io::ModelFile file = io::parse_model_json(text, path.string());
        if (file.dataset_hash != loaded.hash) {
            throw io::DataError(path.string() + ": tuned on dataset " + file.dataset_hash + " but " +
                                dataset_path.string() + " hashes to " + loaded.hash);
        }
        if (file.model.scaler.feature_mean.size() != loaded.data.width()) {
            throw io::DataError(path.string() + ": feature width differs from the dataset");
        }
        std::string stem = path.stem().string();
        if (stem.rfind("model_", 0) == 0) {
            stem = stem.substr(6);
        }
        models.emplace_back(std::move(file), stem);
    }
    const io::Provenance prov = provenance(cfg, canonical_eval(cfg, hashes));

    io::OutputSet outputs;
    std::vector<std::pair<std::string, EvalReport>> table;
    for (const auto& [file, stem] : models) {
        Dataset test;
        try {
            test = split(loaded.data, file.test_fraction, file.split_seed).second;
        } catch (const std::invalid_argument& e) {
            throw io::DataError(dataset_path.string() + ": " + e.what());
        }
        EvalReport report;
        try {
            report = evaluate(file.model, test, cfg.eval.bands);
        } catch (const std::invalid_argument& e) {
            throw io::DataError(std::string("evaluation failed: ") + e.what());
        }
        if (!std::isfinite(report.mse)) {
            throw NumericalError("evaluation produced non-finite errors for " + stem);
        }
        const std::string name = upper(file.algorithm) + "-SVR";
        outputs.add(dir / ("eval_" + stem + ".txt"), io::eval_report_text(report, name, prov));
        outputs.add(dir / ("hitrate_" + stem + ".csv"), io::hit_rate_csv(report, prov));
        out << io::eval_report_text(report, name, prov);
        table.emplace_back(name, report);
    }
    outputs.add(dir / "eval_table.csv", io::eval_table_csv(table, prov));
    outputs.commit(cfg.overwrite);
}

void cmd_predict(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err)
{
    const std::string& text = cfg.predict.scenario;
    std::vector<double> v;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        double x = 0.0;
        if (!io::parse_double(std::string_view(text).substr(start, comma - start), x) || !std::isfinite(x)) {
            throw UsageError("--scenario expects five comma-separated numbers I_A,t1_ms,t2_s,omega_rad,T0_K");
        }
        v.push_back(x);
        if (comma == text.size()) {
            break;
        }
        start = comma + 1;
    }
    if (v.size() != 5) {
        throw UsageError("--scenario expects five comma-separated numbers I_A,t1_ms,t2_s,omega_rad,T0_K");
    }
    const fs::path model_path = or_default(cfg.predict.model, fs::path(cfg.out_dir) / "model_iwoa.json");
    const io::ModelFile file = io::parse_model_json(io::read_file(model_path), model_path.string());
    if (file.model.scaler.feature_mean.size() != 5) {
        throw io::DataError(model_path.string() + ": model does not take the five scenario factors");
    }
    const thermal::ScenarioInput scenario{v[0], v[1], v[2], v[3], v[4]};
    const bool extrapolating = !scenario.in_range();
    if (extrapolating) {
        err << "warning: scenario lies outside the sampled factor ranges; prediction is an extrapolation\n";
    }
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(v.data(), 5);
    const double t_k = predict(file.model, x);
    if (!std::isfinite(t_k)) {
        throw NumericalError("prediction is not finite");
    }
    const double rise = t_k - file.ambient_k;
    out << "temperature_K = " << io::format_double(t_k) << "\n"
        << "temperature_C = " << io::format_double(t_k - kKelvinOffset) << "\n"
        << "rise_over_ambient_C = " << io::format_double(rise) << "\n"
        << "margin_to_125C_rise_C = " << io::format_double(125.0 - rise) << "\n"
        << "extrapolation = " << (extrapolating ? "true" : "false") << "\n";
}

}  // namespace iwoa::cli
