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
#include <atomic>
#include <chrono>
#include <thread>

#include <json.hpp>

#include "qbench/cmaes.hpp"
#include "qbench/common.hpp"
#include "qbench/errors.hpp"
#include "qbench/harness.hpp"
#include "qbench/qcbm.hpp"

namespace qbench::harness {

namespace {

std::string hash_params(const std::vector<double> &params) {
    Fnv1a h;
    for (double p : params) {
        h.update_double(p);
    }
    return hex64(h.digest());
}

std::uint64_t repetition_seed(std::uint64_t master, const std::string &scenario, std::size_t repetition) {
    Fnv1a h;
    h.update(scenario);
    return derive_seed(master, h.digest(), repetition);
}

void train_qcbm(const BenchConfig &cfg, const Scenario &s, RunRecord &r) {
    const std::size_t n = s.n;
    const std::size_t d = qcbm::param_count(n);
    const auto &target = s.target.probs;
    const double eps = cfg.eps;
    auto loss = [&](std::span<const double> theta) {
        return metrics::kl_divergence(target, qcbm::model_probs(theta, n), eps);
    };
    cmaes::Options opts;
    opts.budget = cfg.qcbm_budget_for(n);
    opts.seed = r.seed;
    opts.init_mean.assign(d, 0.0);
    opts.init_step = cfg.qcbm_init_step;
    const auto res = cmaes::minimize(loss, d, opts);
    r.final_kl = res.best_loss;
    r.evaluations = res.evaluations;
    r.params = res.best_params;
    for (const auto &g : res.history) {
        r.history.push_back({g.generation, g.best, g.median});
    }
}

void train_rbm(const BenchConfig &cfg, const Scenario &s, std::size_t k_gibbs, RunRecord &r) {
    const std::size_t nv = s.n;
    const std::size_t nh = s.n / 2;
    rbm::TrainConfig tc = cfg.rbm;
    tc.k_gibbs = k_gibbs;
    tc.seed = derive_seed(r.seed, 1);

    const std::size_t updates_per_epoch = (cfg.rbm_samples + tc.batch_size - 1) / tc.batch_size;
    rbm::TrainingData data;
    if (cfg.rbm_exact_data) {
        data = rbm::ExactData{s.target.probs, updates_per_epoch};
    } else {
        rbm::Rng sampler(derive_seed(r.seed, 2));
        data = rbm::SampleData{rbm::sample_from(s.target.probs, cfg.rbm_samples, sampler)};
    }
    const std::size_t every = std::max<std::size_t>(1, tc.epochs / std::max<std::size_t>(1, cfg.rbm_history_points));
    auto observe = [&](std::size_t epoch, const rbm::RbmParams &p) {
        const double kl = metrics::kl_divergence(s.target.probs, rbm::exact_visible_probs(p), cfg.eps);
        r.history.push_back({epoch, kl, kl});
    };
    const auto params = rbm::train_pcd(data, tc, nv, nh, observe, every);
    r.final_kl = metrics::kl_divergence(s.target.probs, rbm::exact_visible_probs(params), cfg.eps);
    r.evaluations = tc.epochs * updates_per_epoch;
    r.params = params.flat();
}

} // namespace

RunRecord run_job(const BenchConfig &cfg, const Scenario &s, ModelKind model, std::size_t k_gibbs,
                  std::size_t repetition) {
    RunRecord r;
    r.scenario_id = s.id;
    r.id = job_id(s.id, model, k_gibbs, repetition);
    r.n = s.n;
    r.kappa = s.kappa;
    r.rho = s.rho;
    r.subset_index = s.subset_index;
    r.assets = s.assets;
    r.model = model;
    r.k_gibbs = model == ModelKind::Rbm ? k_gibbs : 0;
    r.repetition = repetition;
    r.seed = repetition_seed(cfg.seed, s.id, repetition);
    r.baseline_kl = s.baseline_kl;

    const auto start = std::chrono::steady_clock::now();
    try {
        if (model == ModelKind::Qcbm) {
            train_qcbm(cfg, s, r);
        } else {
            train_rbm(cfg, s, k_gibbs, r);
        }
        r.params_hash = hash_params(r.params);
    } catch (const std::exception &e) {
        r.ok = false;
        r.error = e.what();
        r.history.clear();
        r.params.clear();
        r.final_kl = 0.0;
    }
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string settings_fingerprint(const BenchConfig &cfg) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["lower_bound"] = cfg.bounds.lower;
    j["upper_bound"] = cfg.bounds.upper;
    j["qcbm_budget"] = cfg.qcbm_budget;
    j["qcbm_budget_factor"] = cfg.qcbm_budget_factor;
    j["qcbm_init_step"] = cfg.qcbm_init_step;
    j["rbm_learning_rate"] = cfg.rbm.learning_rate;
    j["rbm_batch_size"] = cfg.rbm.batch_size;
    j["rbm_epochs"] = cfg.rbm.epochs;
    j["rbm_chains"] = cfg.rbm.n_chains;
    j["rbm_init_weight_std"] = cfg.rbm.init_weight_std;
    j["rbm_samples"] = cfg.rbm_samples;
    j["rbm_exact_data"] = cfg.rbm_exact_data;
    j["rbm_history_points"] = cfg.rbm_history_points;
    j["eps"] = cfg.eps;
    return j.dump();
}

RunOutcome run_benchmark(const BenchConfig &cfg, const ScenarioSet &scenarios, ResultStore *store,
                         const ProgressFn &progress) {
    cfg.validate();
    if (store) {
        store->bind_settings(settings_fingerprint(cfg));
    }
    struct Job {
        const Scenario *scenario;
        ModelKind model;
        std::size_t k;
        std::size_t repetition;
    };
    RunOutcome out;
    out.diagnostics = scenarios.diagnostics;
    const std::set<std::string> done = store ? store->completed_ids() : std::set<std::string>{};

    std::vector<Job> jobs;
    for (const auto &s : scenarios.scenarios) {
        if (store) {
            store->save_scenario(s);
        }
        for (ModelKind m : cfg.models) {
            const std::vector<std::size_t> ks = m == ModelKind::Rbm ? cfg.k_gibbs : std::vector<std::size_t>{0};
            for (std::size_t k : ks) {
                for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
                    if (done.contains(job_id(s.id, m, k, rep))) {
                        ++out.skipped_existing;
                        continue;
                    }
                    jobs.push_back({&s, m, k, rep});
                }
            }
        }
    }

    std::vector<RunRecord> results(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> finished{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job &job = jobs[i];
            results[i] = run_job(cfg, *job.scenario, job.model, job.k, job.repetition);
            if (store) {
                store->append(results[i]);
            }
            const std::size_t count = ++finished;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(results[i], count, jobs.size());
            }
        }
    };
    std::size_t n_workers = cfg.workers > 0 ? cfg.workers : std::max(1U, std::thread::hardware_concurrency());
    n_workers = std::min(n_workers, std::max<std::size_t>(1, jobs.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
    }

    for (auto &r : results) {
        if (!r.ok) {
            ++out.failures;
            out.diagnostics.push_back("run " + r.id + " failed: " + r.error);
        }
    }
    out.records = std::move(results);
    return out;
}

RunOutcome run_benchmark(const BenchConfig &cfg, ResultStore *store, const ProgressFn &progress) {
    const auto pm = load_data(cfg);
    return run_benchmark(cfg, generate_scenarios(cfg, pm), store, progress);
}

} // namespace qbench::harness
