// One PASS/FAIL line per acceptance criterion. Select criteria with
// --criteria 1,2,...; the exit status is nonzero when any selected one fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iwoa/benchmarks.hpp"
#include "iwoa/metrics.hpp"
#include "iwoa/optimizer.hpp"
#include "iwoa/rand.hpp"
#include "iwoa/svr.hpp"
#include "iwoa/thermal.hpp"
#include "qp_oracle.hpp"
#include "test_support.hpp"

using namespace iwoa;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void progress(const std::string& msg)
{
    std::cerr << "  .. " << msg << std::endl;
}

// Shared benchmark protocol of criteria 1 to 3: dim 30, N = 30, 1000
// iterations, 10 runs, one master seed per function for every algorithm.
constexpr int kRuns = 10;
constexpr std::uint64_t kBenchSeed = 20240601;

OptimizerConfig bench_config(Algorithm a)
{
    OptimizerConfig c;
    c.algorithm = a;
    c.population = 30;
    c.max_iterations = 1000;
    return c;
}

class BenchCache {
public:
    const RepeatedRuns& get(const std::string& label, Algorithm a)
    {
        const auto key = std::make_pair(label, a);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            const auto t0 = Clock::now();
            const Problem p = make_problem(benchmark(label), 30);
            it = cache_.emplace(key, run_repeated(p, bench_config(a), kRuns, kBenchSeed)).first;
            progress(label + " " + std::string(to_string(a)) + " " + sci(seconds_since(t0)) + " s");
        }
        return it->second;
    }

private:
    std::map<std::pair<std::string, Algorithm>, RepeatedRuns> cache_;
};

Verdict criterion1(BenchCache& cache)
{
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (const char* f : {"F1", "F2", "F3", "F4"}) {
        for (const RunResult& r : cache.get(f, Algorithm::iwoa).runs) {
            worst = std::max(worst, r.best_f);
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-150 && secs < 600.0,
            "IWOA F1-F4 dim 30, worst run " + sci(worst) + " (<= 1e-150), " + sci(secs) + " s (< 600 s)"};
}

Verdict criterion2(BenchCache& cache)
{
    bool ok = true;
    std::ostringstream d;
    for (const char* f : {"F1", "F2", "F3", "F4", "F7"}) {
        const double iw = cache.get(f, Algorithm::iwoa).stats.mean;
        const double wo = cache.get(f, Algorithm::woa).stats.mean;
        ok = ok && iw <= wo;
        d << f << " " << sci(iw) << "<=" << sci(wo) << "; ";
    }
    const double iw = cache.get("F5", Algorithm::iwoa).stats.mean;
    const double wo = cache.get("F5", Algorithm::woa).stats.mean;
    // Within one order of magnitude; two exact zeros count as equal.
    const bool f5 = (iw == 0.0 && wo == 0.0) || (iw > 0.0 && wo > 0.0 && std::abs(std::log10(iw / wo)) <= 1.0);
    d << "F5 " << sci(iw) << " vs " << sci(wo);
    return {ok && f5, d.str()};
}

int first_below(const std::vector<double>& curve, double level)
{
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve[i] <= level) return static_cast<int>(i) + 1;
    }
    return -1;
}

std::vector<double> median_curve(const RepeatedRuns& rr)
{
    const std::size_t len = rr.runs.front().curve.size();
    std::vector<double> out(len);
    std::vector<double> col(rr.runs.size());
    for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t r = 0; r < rr.runs.size(); ++r) col[r] = rr.runs[r].curve[t];
        std::sort(col.begin(), col.end());
        const std::size_t m = col.size() / 2;
        out[t] = col.size() % 2 ? col[m] : 0.5 * (col[m - 1] + col[m]);
    }
    return out;
}

Verdict criterion3(BenchCache& cache)
{
    const int iw = first_below(median_curve(cache.get("F1", Algorithm::iwoa)), 1e-50);
    const int wo = first_below(median_curve(cache.get("F1", Algorithm::woa)), 1e-50);
    const bool ok = iw > 0 && (wo < 0 || 2 * iw <= wo);
    return {ok, "F1 median curve reaches 1e-50 at iteration " + std::to_string(iw) + " (IWOA) vs " +
                    std::to_string(wo) + " (WOA); need IWOA <= WOA / 2"};
}

Verdict criterion4()
{
    const double end = convergence_factor_sigmoid(1000, 1000);
    const double start = convergence_factor_sigmoid(0, 1000);
    // Sign changes of sigmoid - linear strictly inside the run.
    std::vector<double> crossings;
    double prev = convergence_factor_sigmoid(1, 100000) - convergence_factor_linear(1, 100000);
    for (int i = 2; i < 100000; ++i) {
        const double diff = convergence_factor_sigmoid(i, 100000) - convergence_factor_linear(i, 100000);
        if ((diff < 0.0) != (prev < 0.0)) crossings.push_back(i / 100000.0);
        prev = diff;
    }
    const bool cross_ok = crossings.size() == 1 && crossings[0] > 0.6 && crossings[0] < 0.8;
    const bool ok = end == 0.0 && std::abs(start - 1.99008) <= 1e-5 && cross_ok;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.7f", start);
    return {ok, "a(max)=" + sci(end) + ", a(0)=" + buf + " (need 1.99008+-1e-5), crossings in (0,1): " +
                    std::to_string(crossings.size()) + (crossings.empty() ? "" : " first at " + sci(crossings[0])) +
                    " (need one in (0.6, 0.8))"};
}

Verdict criterion5()
{
    const auto t0 = Clock::now();
    RngStream rng(5);
    SolverOptions tight;
    tight.tolerance = 1e-7;
    double worst = 0.0;
    bool feasible = true;
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.index(19));
        const Eigen::Index w = 1 + static_cast<Eigen::Index>(rng.index(5));
        Dataset d;
        d.features.resize(n, w);
        d.targets.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double s = 0.0;
            for (Eigen::Index j = 0; j < w; ++j) {
                d.features(i, j) = rng.uniform(-3.0, 3.0);
                s += std::cos(d.features(i, j) + 0.3 * static_cast<double>(j));
            }
            d.targets(i) = 10.0 * s + rng.normal();
        }
        const SvrParams p{std::pow(10.0, rng.uniform(-2.0, 3.0)), rng.uniform(0.0, 0.5),
                          std::pow(10.0, rng.uniform(-2.0, 1.0))};
        const SvrModel m = fit_svr(d, p, tight);
        feasible = feasible && m.dual_coefs.cwiseAbs().maxCoeff() <= p.C * (1.0 + 1e-12) &&
                   std::abs(m.dual_coefs.sum()) <= 1e-6;
        const oracle::RawFit ref = oracle::fit_raw(d.features, d.targets, p.C, p.epsilon, p.gamma);
        for (int k = 0; k < 100; ++k) {
            Eigen::VectorXd z(w);
            for (Eigen::Index j = 0; j < w; ++j) z(j) = rng.uniform(-3.5, 3.5);
            worst = std::max(worst, std::abs(predict(m, z) - ref.predict_raw(z)));
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::VectorXd z = d.features.row(i).transpose();
            worst = std::max(worst, std::abs(predict(m, z) - ref.predict_raw(z)));
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-4 && feasible && secs < 120.0,
            "200 datasets, max |SMO - oracle| = " + sci(worst) + " (<= 1e-4), constraints " +
                (feasible ? "hold" : "VIOLATED") + ", " + sci(secs) + " s (< 120 s)"};
}

Verdict criterion6()
{
    constexpr int kBins = 20;
    std::vector<int> counts(kBins, 0);
    TentSequence seq(RngStream(6));
    for (int k = 0; k < 100000; ++k) {
        counts[static_cast<std::size_t>(std::min(kBins - 1, static_cast<int>(seq.next() * kBins)))]++;
    }
    double chi2 = 0.0;
    for (const int c : counts) chi2 += (c - 5000.0) * (c - 5000.0) / 5000.0;
    const bool tent_ok = chi2 < 36.191;  // chi-square 0.99 quantile, 19 dof

    OUParams p;
    p.length = 1000000;
    RngStream rng(66);
    const Eigen::VectorXd x = ou_path(p, rng);
    const double mean = x.mean();
    const double sd = std::sqrt((x.array() - mean).square().sum() / static_cast<double>(x.size() - 1));
    const double target = p.sigma / std::sqrt(2.0 * p.theta);
    const double rel = std::abs(sd - target) / target;
    int min_changes = 1 << 30;
    for (Eigen::Index w = 0; w + 10000 <= x.size(); w += 10000) {
        int changes = 0;
        for (Eigen::Index k = w + 1; k < w + 10000; ++k) changes += (x(k - 1) < 0.0) != (x(k) < 0.0);
        min_changes = std::min(min_changes, changes);
    }
    return {tent_ok && rel <= 0.05 && min_changes >= 1,
            "tent chi2 " + sci(chi2) + " (< 36.191), OU std rel. error " + sci(rel) +
                " (<= 0.05), min sign changes per 1e4 steps " + std::to_string(min_changes)};
}

Verdict criterion7()
{
    using namespace thermal;
    const SurrogateConfig cfg;
    RngStream rng(7);
    auto draw = [&] {
        ScenarioInput s;
        s.current_a = rng.uniform(0, 1600);
        s.insertion_ms = rng.uniform(7, 12);
        s.cooling_s = rng.uniform(0, 1800);
        s.phase_rad = rng.uniform(0, 6.28);
        s.initial_k = rng.uniform(293, 393);
        return s;
    };
    bool mono = true;
    bool bounds = true;
    for (int k = 0; k < 100; ++k) {
        const ScenarioInput base = draw();
        double pi = -1.0, pt = -1.0, pc = 1e9;
        for (int s = 0; s <= 16; ++s) {
            ScenarioInput a = base, b = base, c = base;
            a.current_a = 100.0 * s;
            b.initial_k = 293.0 + 100.0 * s / 16.0;
            c.cooling_s = 1800.0 * s / 16.0;
            const double ta = simulate(a, cfg).temperature_k;
            const double tb = simulate(b, cfg).temperature_k;
            const double tc = simulate(c, cfg).temperature_k;
            mono = mono && ta >= pi && tb >= pt && tc <= pc;
            pi = ta, pt = tb, pc = tc;
        }
        const LabeledSample out = simulate(base, cfg);
        bounds = bounds && out.temperature_k >= cfg.ambient_k && out.temperature_k <= out.peak_k;
    }
    SurrogateConfig flat = cfg;
    flat.constant_conductance = true;
    double cool_err = 0.0;
    for (const double t2 : {10.0, 300.0, 1800.0}) {
        for (const double peak : {310.0, 400.0}) {
            const double exact = flat.ambient_k + (peak - flat.ambient_k) *
                                                      std::exp(-flat.k0_w_per_k * t2 / flat.heat_capacity());
            cool_err = std::max(cool_err, std::abs(cool(peak, t2, flat) - exact) / exact);
        }
    }
    double phase_spread = 0.0;
    ScenarioInput half;
    half.current_a = 1400;
    half.insertion_ms = 10.0;
    half.cooling_s = 500;
    half.initial_k = 330;
    const double ref = simulate(half, cfg).temperature_k;
    for (double om = 0.0; om <= 6.28; om += 0.3) {
        half.phase_rad = om;
        phase_spread = std::max(phase_spread, std::abs(simulate(half, cfg).temperature_k - ref));
    }
    SurrogateConfig fine = cfg;
    fine.ode_dt_s = cfg.ode_dt_s / 2.0;
    double dt_change = 0.0;
    for (int k = 0; k < 200; ++k) {
        const ScenarioInput s = draw();
        dt_change = std::max(dt_change, std::abs(simulate(s, cfg).temperature_k - simulate(s, fine).temperature_k));
    }
    const bool ok = mono && bounds && cool_err <= 1e-6 && phase_spread <= 1e-9 && dt_change < 1e-4;
    return {ok, std::string("monotone ") + (mono ? "yes" : "NO") + ", bounds " + (bounds ? "yes" : "NO") +
                    ", constant-k rel. error " + sci(cool_err) + ", half-period phase spread " +
                    sci(phase_spread) + " K, dt halving " + sci(dt_change) + " K"};
}

Verdict criterion8()
{
    const auto t0 = Clock::now();
    const Dataset data = thermal::generate_dataset(4000, thermal::SurrogateConfig{}, 42);
    const auto [train, test] = split(data, 0.3, 42);
    OptimizerConfig budget;
    budget.population = 20;
    budget.max_iterations = 50;
    std::vector<double> mse_iwoa;
    std::vector<double> mse_woa;
    double min_r2 = 1.0;
    double min_hit4 = 1.0;
    int failed = 0;
    std::ostringstream d;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        for (const Algorithm a : {Algorithm::iwoa, Algorithm::woa}) {
            const auto ts = Clock::now();
            const std::string tag = "seed " + std::to_string(seed) + " " + std::string(to_string(a));
            // A tune that cannot converge counts as a failed run with infinite error.
            double mse = std::numeric_limits<double>::infinity();
            double r2 = -std::numeric_limits<double>::infinity();
            double hit4 = 0.0;
            try {
                const TuneResult tr = tune_svr(train, a, budget, seed);
                const EvalReport rep = evaluate(tr.model, test);
                mse = rep.mse;
                r2 = rep.r2;
                hit4 = rep.hit_rates.at(4.0);
                progress(tag + " C=" + sci(tr.params.C) + " gamma=" + sci(tr.params.gamma) + " cv=" +
                         sci(tr.cv_mse) + " test R2=" + sci(r2) + " MSE=" + sci(mse) + " hit4=" + sci(hit4) + " " +
                         sci(seconds_since(ts)) + " s");
            } catch (const SvrConvergenceError& e) {
                ++failed;
                progress(tag + " FAILED: " + e.what() + " " + sci(seconds_since(ts)) + " s");
            }
            if (a == Algorithm::iwoa) {
                mse_iwoa.push_back(mse);
                min_r2 = std::min(min_r2, r2);
                min_hit4 = std::min(min_hit4, hit4);
            } else {
                mse_woa.push_back(mse);
            }
        }
    }
    std::sort(mse_iwoa.begin(), mse_iwoa.end());
    std::sort(mse_woa.begin(), mse_woa.end());
    const double secs = seconds_since(t0);
    const bool ok = failed == 0 && min_r2 >= 0.98 && min_hit4 >= 0.90 && mse_iwoa[2] <= mse_woa[2] && secs < 1800.0;
    d << failed << " of 10 tunes failed to converge; IWOA worst R2 " << sci(min_r2) << " (>= 0.98), worst hit4 " << sci(min_hit4)
      << " (>= 0.90), median MSE IWOA " << sci(mse_iwoa[2]) << " vs WOA " << sci(mse_woa[2]) << ", "
      << sci(secs) << " s (< 1800 s)";
    return {ok, d.str()};
}

Verdict criterion9()
{
    testing::TempDir a("acc9_a");
    testing::TempDir b("acc9_b");
    auto commands = [](const std::string& dir) {
        using V = std::vector<std::string>;
        return std::vector<V>{
            V{"bench", "--out-dir", dir, "--seed", "9", "--functions", "F1,F6", "--dims", "10", "--iterations", "30",
              "--runs", "3", "--threads", "2"},
            V{"gen-data", "--out-dir", dir, "--seed", "9", "--n", "300"},
            V{"tune", "--out-dir", dir, "--seed", "9", "--algo", "iwoa", "--population", "4", "--iterations", "3"},
            V{"tune", "--out-dir", dir, "--seed", "9", "--algo", "ssa", "--population", "4", "--iterations", "3"},
            V{"eval", "--out-dir", dir, "--seed", "9", "--model", dir + "/model_iwoa.json", "--model",
              dir + "/model_ssa.json"},
            V{"predict", "--out-dir", dir, "--seed", "9", "--scenario", "500.33,10.82,1259.97,0.49,331.63"},
        };
    };
    const auto ca = commands(a.str());
    const auto cb = commands(b.str());
    std::vector<std::string> out_a;
    std::vector<std::string> out_b;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        const auto ra = testing::cli(ca[i]);
        const auto rb = testing::cli(cb[i]);
        if (ra.code != 0 || rb.code != 0) {
            return {false, ca[i][0] + " exited with " + std::to_string(ra.code) + ": " + ra.err};
        }
        out_a.push_back(ra.out);
        std::string o = rb.out;
        for (auto p = o.find(b.str()); p != std::string::npos; p = o.find(b.str())) o.replace(p, b.str().size(), a.str());
        out_b.push_back(o);
    }
    const auto sa = testing::snapshot(a.path());
    const auto sb = testing::snapshot(b.path());
    return {sa == sb && out_a == out_b, std::to_string(sa.size()) + " files and " + std::to_string(out_a.size()) +
                                            " stdout streams compared, " +
                                            (sa == sb && out_a == out_b ? "all identical" : "DIFFERENCES found")};
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance checks"};
    std::vector<int> selected;
    app.add_option("--criteria", selected, "Criteria to run (default all)")->delimiter(',')->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);
    if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    const std::set<int> chosen(selected.begin(), selected.end());

    BenchCache cache;
    const std::map<int, std::function<Verdict()>> checks{
        {1, [&] { return criterion1(cache); }}, {2, [&] { return criterion2(cache); }},
        {3, [&] { return criterion3(cache); }}, {4, criterion4},
        {5, criterion5},                        {6, criterion6},
        {7, criterion7},                        {8, criterion8},
        {9, criterion9},
    };
    int failed = 0;
    for (const int c : chosen) {
        Verdict v;
        try {
            v = checks.at(c)();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::cout << "criterion " << c << ": " << (v.pass ? "PASS" : "FAIL") << " - " << v.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
