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
#pragma once

/// Benchmark orchestration: scenario generation, training runs, persistence,
/// bootstrap summaries and plot-ready tables.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qbench/frontier.hpp"
#include "qbench/market_data.hpp"
#include "qbench/metrics.hpp"
#include "qbench/rbm.hpp"

namespace qbench::harness {

enum class ModelKind { Qcbm, Rbm };

[[nodiscard]] std::string to_string(ModelKind m);
[[nodiscard]] ModelKind parse_model(const std::string &s);

/// Named return-level presets: "A" = {0.010, 0.015, ..., 0.035} and "B" = A scaled by 0.1.
[[nodiscard]] std::vector<double> return_level_preset(const std::string &name);

struct BenchConfig {
    std::optional<std::filesystem::path> price_file;
    market::SynthSpec synth;

    std::vector<std::size_t> sizes{4, 6, 8, 10};
    std::optional<std::size_t> kappa; ///< unset: N/2
    std::vector<double> return_levels = return_level_preset("B");
    frontier::Bounds bounds;
    std::size_t subsets_per_size = 5;
    std::size_t repetitions = 11;
    std::vector<ModelKind> models{ModelKind::Qcbm, ModelKind::Rbm};
    std::vector<std::size_t> k_gibbs{1};
    std::uint64_t seed = 2019;

    std::size_t qcbm_budget = 0;     ///< 0: 20 d^2 evaluations
    double qcbm_budget_factor = 20.0;
    double qcbm_init_step = 0.3;

    rbm::TrainConfig rbm;
    std::size_t rbm_samples = 10000;
    bool rbm_exact_data = false;
    std::size_t rbm_history_points = 100;

    double eps = metrics::kDefaultEpsilon;
    std::size_t workers = 0; ///< 0: hardware concurrency
    std::size_t bootstrap_resamples = 10000;

    [[nodiscard]] std::size_t kappa_for(std::size_t n) const { return kappa ? *kappa : n / 2; }
    [[nodiscard]] std::size_t qcbm_budget_for(std::size_t n) const;
    void validate() const;
};

struct Scenario {
    std::string id;
    std::size_t n = 0;
    std::size_t kappa = 0;
    double rho = 0.0;
    std::size_t subset_index = 0;
    std::uint64_t subset_seed = 0;
    std::vector<std::size_t> assets;
    std::vector<std::string> tickers;
    std::uint64_t data_hash = 0;
    frontier::TargetDistribution target;
    double baseline_kl = 0.0;
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    std::vector<std::string> diagnostics; ///< one line per skipped scenario
};

/// Stable content hash id of (N, kappa, rho, asset subset, data hash).
[[nodiscard]] std::string scenario_id(std::size_t n, std::size_t kappa, double rho,
                                      const std::vector<std::size_t> &assets, std::uint64_t data_hash);

[[nodiscard]] ScenarioSet generate_scenarios(const BenchConfig &cfg, const market::PriceMatrix &pm);

struct HistoryPoint {
    std::size_t step = 0; ///< generation (QCBM) or epoch (RBM)
    double best = 0.0;    ///< best loss in generation, or KL after the epoch
    double median = 0.0;  ///< generation median loss (QCBM); equals best for RBM
};

struct RunRecord {
    std::string id;
    std::string scenario_id;
    std::size_t n = 0;
    std::size_t kappa = 0;
    double rho = 0.0;
    std::size_t subset_index = 0;
    std::vector<std::size_t> assets;
    ModelKind model = ModelKind::Qcbm;
    std::size_t k_gibbs = 0; ///< 0 for QCBM
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    bool ok = true;
    std::string error;
    double final_kl = 0.0;
    double baseline_kl = 0.0;
    std::size_t evaluations = 0; ///< loss evaluations (QCBM) or parameter updates (RBM)
    std::vector<HistoryPoint> history;
    std::vector<double> params;
    std::string params_hash;
    double wall_time_s = 0.0;
};

[[nodiscard]] std::string job_id(const std::string &scenario, ModelKind model, std::size_t k_gibbs,
                                 std::size_t repetition);

/// One JSON object per line; wall time is the last field.
[[nodiscard]] std::string to_json_line(const RunRecord &r);
[[nodiscard]] RunRecord record_from_json(const std::string &line);
/// The serialized record with the wall-time field removed.
[[nodiscard]] std::string canonical_line(const RunRecord &r);

/// Append-only results file plus scenario targets, rooted at a directory.
class ResultStore {
  public:
    explicit ResultStore(std::filesystem::path root);

    [[nodiscard]] const std::filesystem::path &root() const noexcept { return root_; }
    [[nodiscard]] std::filesystem::path records_path() const { return root_ / "records.jsonl"; }
    [[nodiscard]] std::filesystem::path target_dir() const { return root_ / "targets"; }

    [[nodiscard]] std::vector<RunRecord> load() const;
    [[nodiscard]] std::set<std::string> completed_ids() const;
    void append(const RunRecord &r);
    void save_scenario(const Scenario &s) const;
    /// Records the training settings on first use; later calls with different
    /// settings throw ConfigError so resumed runs never mix configurations.
    void bind_settings(const std::string &fingerprint) const;

  private:
    std::filesystem::path root_;
    std::mutex mutex_;
};

struct RunOutcome {
    std::vector<RunRecord> records; ///< newly produced, in job order
    std::size_t skipped_existing = 0;
    std::size_t failures = 0;
    std::vector<std::string> diagnostics;
};

using ProgressFn = std::function<void(const RunRecord &, std::size_t done, std::size_t total)>;

/// Trains one model on one scenario.
/// Canonical text of every setting that changes a run's result for a given
/// scenario, repetition and Gibbs depth.
[[nodiscard]] std::string settings_fingerprint(const BenchConfig &cfg);

[[nodiscard]] RunRecord run_job(const BenchConfig &cfg, const Scenario &s, ModelKind model,
                                std::size_t k_gibbs, std::size_t repetition);

[[nodiscard]] RunOutcome run_benchmark(const BenchConfig &cfg, const ScenarioSet &scenarios,
                                       ResultStore *store = nullptr, const ProgressFn &progress = {});

/// Loads or synthesizes the price data named by the config.
[[nodiscard]] market::PriceMatrix load_data(const BenchConfig &cfg);

[[nodiscard]] RunOutcome run_benchmark(const BenchConfig &cfg, ResultStore *store = nullptr,
                                       const ProgressFn &progress = {});

struct SummaryRow {
    std::size_t n = 0;
    std::string model; ///< "qcbm", "rbm" or "uniform"
    std::size_t k_gibbs = 0;
    std::size_t scenarios = 0;
    std::size_t runs = 0;
    std::size_t failed = 0;
    metrics::BootstrapSummary stats;
};

/// Per-scenario medians over repetitions, bootstrapped per (N, model, k_gibbs),
/// plus one uniform-baseline row per N.
[[nodiscard]] std::vector<SummaryRow> summarize(const std::vector<RunRecord> &records, std::size_t resamples,
                                                std::uint64_t seed);

void write_summary(std::ostream &out, const std::vector<SummaryRow> &rows);

/// Median final KL over repetitions, keyed by scenario id, for one model and k.
[[nodiscard]] std::map<std::string, double> scenario_medians(const std::vector<RunRecord> &records,
                                                             ModelKind model, std::size_t k_gibbs);

struct PlotOutput {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

/// Writes scaling.tsv, scatter_N<n>_k<k>.tsv and targets_N<n>.tsv into out_dir.
[[nodiscard]] PlotOutput emit_plots(const std::vector<RunRecord> &records, const std::filesystem::path &out_dir,
                                    const std::filesystem::path &target_dir = {}, std::size_t resamples = 10000,
                                    std::uint64_t seed = 0);

} // namespace qbench::harness
