#include "iwoa/cli.hpp"

#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "iwoa/io.hpp"
#include "iwoa/svr.hpp"
#include "iwoa/version.hpp"

namespace iwoa {

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> preset;
    bool overwrite = false;

    std::vector<std::string> functions;
    std::vector<int> dims;
    std::vector<std::string> algorithms;
    std::optional<int> bench_population;
    std::optional<int> bench_iterations;
    std::optional<int> runs;
    std::optional<int> threads;

    std::optional<int> n;
    std::optional<std::string> name;

    std::optional<std::string> tune_dataset;
    std::optional<std::string> algo;
    std::optional<int> tune_population;
    std::optional<int> tune_iterations;
    std::optional<std::uint64_t> split_seed;
    std::optional<int> folds;

    std::vector<std::string> models;
    std::optional<std::string> eval_dataset;

    std::optional<std::string> predict_model;
    std::optional<std::string> scenario;
};

template <typename T>
void overlay(T& target, const std::optional<T>& value)
{
    if (value) {
        target = *value;
    }
}

cli::ExperimentConfig resolve(const Flags& f)
{
    std::string text;
    if (!f.config.empty()) {
        text = io::read_file(f.config);
    }
    cli::Preset preset = cli::Preset::paper;
    if (f.preset) {
        preset = cli::parse_preset(*f.preset);
    } else if (!text.empty()) {
        preset = cli::preset_from_toml(text, f.config).value_or(preset);
    }
    cli::ExperimentConfig cfg = cli::preset_config(preset);
    if (!f.config.empty()) {
        cli::apply_toml(cfg, text, f.config);
    }
    overlay(cfg.seed, f.seed);
    overlay(cfg.out_dir, f.out_dir);
    cfg.overwrite = f.overwrite;

    if (!f.functions.empty()) {
        cfg.bench.functions = f.functions;
        for (auto& s : cfg.bench.functions) {
            for (auto& c : s) {
                c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            }
        }
    }
    if (!f.dims.empty()) {
        cfg.bench.dims = f.dims;
    }
    if (!f.algorithms.empty()) {
        cfg.bench.algorithms = f.algorithms;
    }
    overlay(cfg.bench.population, f.bench_population);
    overlay(cfg.bench.iterations, f.bench_iterations);
    overlay(cfg.bench.runs, f.runs);
    overlay(cfg.bench.threads, f.threads);

    overlay(cfg.gen_data.n, f.n);
    overlay(cfg.gen_data.name, f.name);

    overlay(cfg.tune.dataset, f.tune_dataset);
    overlay(cfg.tune.algorithm, f.algo);
    overlay(cfg.tune.population, f.tune_population);
    overlay(cfg.tune.iterations, f.tune_iterations);
    if (f.split_seed) {
        cfg.tune.split_seed = f.split_seed;
    }
    overlay(cfg.tune.options.folds, f.folds);

    if (!f.models.empty()) {
        cfg.eval.models = f.models;
    }
    overlay(cfg.eval.dataset, f.eval_dataset);

    overlay(cfg.predict.model, f.predict_model);
    overlay(cfg.predict.scenario, f.scenario);
    cli::validate(cfg);
    return cfg;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Flags f;
    CLI::App app("Improved whale optimization, SVR tuning and PIR temperature surrogate", "iwoa");
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.add_option("--config", f.config, "TOML experiment file");
    app.add_option("--seed", f.seed, "Master seed");
    app.add_option("--out-dir", f.out_dir, "Directory for output files");
    app.add_option("--preset", f.preset, "paper or desk")->check(CLI::IsMember({"paper", "desk"}));
    app.add_flag("--overwrite", f.overwrite, "Replace existing output files");

    CLI::App* bench = app.add_subcommand("bench", "Benchmark the optimizers on F1..F7");
    bench->add_option("--functions", f.functions, "Function labels, e.g. F1,F3")->delimiter(',');
    bench->add_option("--dims", f.dims, "Dimensions, e.g. 10,30")->delimiter(',');
    bench->add_option("--algorithms", f.algorithms, "Subset of GWO,SSA,WOA,IWOA")->delimiter(',');
    bench->add_option("--population", f.bench_population, "Population size");
    bench->add_option("--iterations", f.bench_iterations, "Iterations per run");
    bench->add_option("--runs", f.runs, "Independent runs per combination");
    bench->add_option("--threads", f.threads, "Worker threads for independent runs");

    CLI::App* gen = app.add_subcommand("gen-data", "Generate a labeled surrogate dataset");
    gen->add_option("--n", f.n, "Number of scenarios");
    gen->add_option("--name", f.name, "File stem for the dataset files");

    CLI::App* tune = app.add_subcommand("tune", "Tune SVR hyperparameters and save the model");
    tune->add_option("--dataset", f.tune_dataset, "Dataset CSV (default <out-dir>/dataset.csv)");
    tune->add_option("--algo", f.algo, "gwo, ssa, woa or iwoa");
    tune->add_option("--population", f.tune_population, "Optimizer population");
    tune->add_option("--iterations", f.tune_iterations, "Optimizer iterations");
    tune->add_option("--split-seed", f.split_seed, "Seed of the train/test split (default --seed)");
    tune->add_option("--folds", f.folds, "Cross-validation folds");

    CLI::App* eval = app.add_subcommand("eval", "Score saved models on their test split");
    eval->add_option("--model", f.models, "Model JSON (repeatable)");
    eval->add_option("--dataset", f.eval_dataset, "Dataset CSV (default <out-dir>/dataset.csv)");

    CLI::App* pred = app.add_subcommand("predict", "Predict the post-cooling temperature of one scenario");
    pred->add_option("--model", f.predict_model, "Model JSON (default <out-dir>/model_iwoa.json)");
    pred->add_option("--scenario", f.scenario, "I_A,t1_ms,t2_s,omega_rad,T0_K");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const cli::ExperimentConfig cfg = resolve(f);
        if (bench->parsed()) {
            cli::cmd_bench(cfg, out);
        } else if (gen->parsed()) {
            cli::cmd_gen_data(cfg, out);
        } else if (tune->parsed()) {
            cli::cmd_tune(cfg, out);
        } else if (eval->parsed()) {
            cli::cmd_eval(cfg, out);
        } else {
            if (cfg.predict.scenario.empty()) {
                throw cli::UsageError("predict needs --scenario I_A,t1_ms,t2_s,omega_rad,T0_K");
            }
            cli::cmd_predict(cfg, out, err);
        }
    } catch (const cli::UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const io::OutputExists& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const io::DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const cli::NumericalError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const SvrConvergenceError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace iwoa
