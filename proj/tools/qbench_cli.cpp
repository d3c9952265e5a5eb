// Copyright 2026 The qbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// Command-line front end for the portfolio generative-model benchmark.

#include <algorithm>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qbench/errors.hpp"
#include "qbench/harness.hpp"

namespace {

using namespace qbench;

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitPartial = 3;

struct BenchOptions {
    harness::BenchConfig cfg;
    std::string prices;
    std::string preset;
    std::vector<double> levels;
    std::vector<std::string> models{"qcbm", "rbm"};
    std::size_t kappa = 0;

    void finalize() {
        if (!prices.empty()) {
            cfg.price_file = prices;
        }
        if (!preset.empty() && !levels.empty()) {
            throw ConfigError("--preset and --levels are mutually exclusive");
        }
        if (!preset.empty()) {
            cfg.return_levels = harness::return_level_preset(preset);
        } else if (!levels.empty()) {
            cfg.return_levels = levels;
        }
        cfg.models.clear();
        for (const auto &m : models) {
            cfg.models.push_back(harness::parse_model(m));
        }
        if (kappa > 0) {
            cfg.kappa = kappa;
        }
        cfg.validate();
    }
};

void add_synth_options(CLI::App *app, market::SynthSpec &s, const std::string &prefix) {
    app->add_option("--" + prefix + "assets", s.n_assets, "Number of synthetic assets")->capture_default_str();
    app->add_option("--" + prefix + "days", s.n_days, "Number of synthetic trading days")->capture_default_str();
    app->add_option("--" + prefix + "seed", s.seed, "Seed of the synthetic price generator")->capture_default_str();
    app->add_option("--" + prefix + "drift-lo", s.drift.lo, "Lower end of the daily drift range")->capture_default_str();
    app->add_option("--" + prefix + "drift-hi", s.drift.hi, "Upper end of the daily drift range")->capture_default_str();
    app->add_option("--" + prefix + "vol-lo", s.vol.lo, "Lower end of the daily volatility range")->capture_default_str();
    app->add_option("--" + prefix + "vol-hi", s.vol.hi, "Upper end of the daily volatility range")->capture_default_str();
}

void add_bench_options(CLI::App *app, BenchOptions &o) {
    auto &c = o.cfg;
    app->add_option("--prices", o.prices, "Wide CSV price file (synthetic data when omitted)");
    add_synth_options(app, c.synth, "synth-");
    app->add_option("--sizes", c.sizes, "Problem sizes N")->capture_default_str();
    app->add_option("--kappa", o.kappa, "Fixed cardinality (default N/2)");
    app->add_option("--preset", o.preset, "Return-level preset: A or B (default B)");
    app->add_option("--levels", o.levels, "Explicit return levels");
    app->add_option("--lower", c.bounds.lower, "Lower weight bound per selected asset")->capture_default_str();
    app->add_option("--upper", c.bounds.upper, "Upper weight bound per selected asset")->capture_default_str();
    app->add_option("--subsets", c.subsets_per_size, "Random asset subsets per size")->capture_default_str();
    app->add_option("--repetitions", c.repetitions, "Training repetitions per scenario")->capture_default_str();
    app->add_option("--models", o.models, "Models to train (qcbm, rbm)")->capture_default_str();
    app->add_option("--k-gibbs", c.k_gibbs, "Gibbs steps per PCD update (list)")->capture_default_str();
    app->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    app->add_option("--qcbm-budget", c.qcbm_budget, "CMA-ES evaluation budget (0: factor * d^2)")->capture_default_str();
    app->add_option("--qcbm-budget-factor", c.qcbm_budget_factor, "Budget factor on d^2")->capture_default_str();
    app->add_option("--qcbm-init-step", c.qcbm_init_step, "Initial CMA-ES step size in half turns")->capture_default_str();
    app->add_option("--rbm-lr", c.rbm.learning_rate, "RBM learning rate")->capture_default_str();
    app->add_option("--rbm-batch", c.rbm.batch_size, "RBM minibatch size")->capture_default_str();
    app->add_option("--rbm-epochs", c.rbm.epochs, "RBM training epochs")->capture_default_str();
    app->add_option("--rbm-chains", c.rbm.n_chains, "Persistent chains")->capture_default_str();
    app->add_option("--rbm-samples", c.rbm_samples, "Training samples drawn from each target")->capture_default_str();
    app->add_flag("--rbm-exact-data", c.rbm_exact_data, "Train on exact target expectations instead of samples");
    app->add_option("--eps", c.eps, "KL clip epsilon")->capture_default_str();
    app->add_option("--workers", c.workers, "Worker threads (0: hardware concurrency)")->capture_default_str();
}

void print_diagnostics(const std::vector<std::string> &lines) {
    for (const auto &l : lines) {
        std::cerr << "warning: " << l << '\n';
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Benchmark of quantum circuit Born machines against RBMs on portfolio targets"};
    app.set_config("--config", "",
                   "TOML/INI file; options go in a section named after the subcommand, e.g. [run]. "
                   "Command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    // ingest
    auto *ingest = app.add_subcommand("ingest", "Validate a price file and optionally rewrite it canonically");
    std::string ingest_in;
    std::string ingest_out;
    ingest->add_option("input", ingest_in, "Wide CSV price file")->required();
    ingest->add_option("-o,--output", ingest_out, "Write the validated matrix here");

    // synth
    auto *synth = app.add_subcommand("synth", "Generate synthetic geometric random-walk prices");
    market::SynthSpec synth_spec;
    std::string synth_out;
    add_synth_options(synth, synth_spec, "");
    synth->add_option("-o,--output", synth_out, "Output CSV path")->required();

    // targets
    auto *targets = app.add_subcommand("targets", "Build target distributions for every scenario");
    BenchOptions target_opts;
    std::string targets_out;
    add_bench_options(targets, target_opts);
    targets->add_option("-o,--out", targets_out, "Directory for .target.json files")->required();

    // run
    auto *run = app.add_subcommand("run", "Train both models on every scenario (resumable)");
    BenchOptions run_opts;
    std::string store_dir;
    bool quiet = false;
    add_bench_options(run, run_opts);
    run->add_option("-s,--store", store_dir, "Result store directory")->required();
    run->add_flag("-q,--quiet", quiet, "Suppress per-run progress lines");

    // summarize
    auto *summ = app.add_subcommand("summarize", "Bootstrap summary table of a result store");
    std::string summ_store;
    std::string summ_out;
    std::size_t resamples = 10000;
    std::uint64_t summ_seed = 0;
    summ->add_option("-s,--store", summ_store, "Result store directory")->required();
    summ->add_option("-o,--output", summ_out, "Write the table here as well as to stdout");
    summ->add_option("--resamples", resamples, "Bootstrap resamples")->capture_default_str();
    summ->add_option("--seed", summ_seed, "Bootstrap seed")->capture_default_str();

    // plot-data
    auto *plot = app.add_subcommand("plot-data", "Emit plot-ready tables from a result store");
    std::string plot_store;
    std::string plot_out;
    std::size_t plot_resamples = 10000;
    std::uint64_t plot_seed = 0;
    plot->add_option("-s,--store", plot_store, "Result store directory")->required();
    plot->add_option("-o,--out", plot_out, "Output directory")->required();
    plot->add_option("--resamples", plot_resamples, "Bootstrap resamples")->capture_default_str();
    plot->add_option("--seed", plot_seed, "Bootstrap seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*ingest) {
            const auto pm = market::load_prices(ingest_in);
            std::cout << "ok: " << pm.num_days() << " dates x " << pm.num_assets() << " assets, "
                      << market::format_date(pm.dates().front()) << " .. "
                      << market::format_date(pm.dates().back()) << '\n';
            if (!ingest_out.empty()) {
                market::save_prices(ingest_out, pm);
            }
        } else if (*synth) {
            market::save_prices(synth_out, market::synth_prices(synth_spec));
        } else if (*targets) {
            target_opts.finalize();
            const auto pm = harness::load_data(target_opts.cfg);
            const auto set = harness::generate_scenarios(target_opts.cfg, pm);
            std::filesystem::create_directories(targets_out);
            for (const auto &s : set.scenarios) {
                frontier::save_target(std::filesystem::path(targets_out) / (s.id + ".target.json"), s.target);
                std::cout << s.id << "\tN=" << s.n << "\tkappa=" << s.kappa << "\trho=" << s.rho
                          << "\tsubset=" << s.subset_index << "\tpeaks=" << s.target.support_size()
                          << "\tbaseline=" << s.baseline_kl << '\n';
            }
            print_diagnostics(set.diagnostics);
        } else if (*run) {
            run_opts.finalize();
            harness::ResultStore store(store_dir);
            auto progress = [quiet](const harness::RunRecord &r, std::size_t done, std::size_t total) {
                if (quiet) {
                    return;
                }
                std::cerr << '[' << done << '/' << total << "] " << r.id << ' '
                          << (r.ok ? "kl=" + std::to_string(r.final_kl) : "FAILED: " + r.error) << " ("
                          << r.wall_time_s << " s)\n";
            };
            const auto outcome = harness::run_benchmark(run_opts.cfg, &store, progress);
            std::cout << "new records: " << outcome.records.size() << ", already present: "
                      << outcome.skipped_existing << ", failures: " << outcome.failures << '\n';
            print_diagnostics(outcome.diagnostics);
            // Failed runs are kept in the store and not retried, so count them there.
            const auto stored = store.load();
            const auto failed = std::count_if(stored.begin(), stored.end(), [](const auto &r) { return !r.ok; });
            if (failed > 0) {
                std::cerr << "store holds " << failed << " failed run(s)\n";
                return kExitPartial;
            }
        } else if (*summ) {
            harness::ResultStore store(summ_store);
            const auto rows = harness::summarize(store.load(), resamples, summ_seed);
            harness::write_summary(std::cout, rows);
            if (!summ_out.empty()) {
                std::ofstream out(summ_out);
                harness::write_summary(out, rows);
            }
        } else if (*plot) {
            harness::ResultStore store(plot_store);
            const auto out = harness::emit_plots(store.load(), plot_out, store.target_dir(), plot_resamples, plot_seed);
            for (const auto &f : out.files) {
                std::cout << f.string() << '\n';
            }
            print_diagnostics(out.warnings);
        }
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
