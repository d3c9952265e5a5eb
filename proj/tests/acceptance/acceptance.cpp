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
// Acceptance suite: one PASS/FAIL line per criterion.
//
// Criteria 7-9 read a persistent result store; the first execution trains the
// full default benchmark and the Gibbs-depth sweep, later executions resume.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracles/oracles.hpp"
#include "qbench/common.hpp"
#include "qbench/errors.hpp"
#include "qbench/frontier.hpp"
#include "qbench/harness.hpp"
#include "qbench/market_data.hpp"
#include "qbench/metrics.hpp"
#include "qbench/qcbm.hpp"
#include "qbench/rbm.hpp"
#include "support/gen.hpp"

namespace fs = std::filesystem;
using namespace qbench;

namespace {

// Pinned tolerances and limits.
constexpr double kSimulatorTol = 1e-10;
constexpr double kSimulatorSeconds = 10.0;
constexpr double kGridStep = 1e-3;
constexpr double kGridSlack = 1e-5;
constexpr double kKktTol = 1e-8;
constexpr double kQpSeconds = 30.0;
constexpr double kRbmTol = 1e-12;
constexpr double kRbmSeconds = 10.0;
constexpr std::size_t kGradChains = 10000;
constexpr std::size_t kGradGibbs = 100;
constexpr double kGradSigmas = 3.0;
constexpr std::size_t kFloorMinReps = 10;
constexpr double kRepetitionSeconds = 60.0;
constexpr double kBenchmarkHours = 4.0;
constexpr double kSweepFraction = 0.6;

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = false;
    std::string detail;
    std::vector<std::string> notes;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream ss;
    ss.precision(precision);
    ss << v;
    return ss.str();
}

// 1
Verdict simulator_oracle() {
    const auto t0 = Clock::now();
    gen::Rng rng(1001);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial) % 5;
        const auto params =
            qcbm::CircuitParams::from_flat(gen::uniform_vector(rng, qcbm::param_count(n), -2.0, 2.0), n);
        const auto u = oracle::ansatz_unitary(params.x_angles, params.z_angles, params.xx_angles, n);
        const auto sv = qcbm::run_ansatz(params, n);
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            worst = std::max(worst, std::abs(u(i, 0) - sv.amplitudes()[static_cast<std::size_t>(i)]));
        }
    }
    const double secs = elapsed(t0);
    return {worst < kSimulatorTol && secs < kSimulatorSeconds,
            "100 circuits, N<=5: max amplitude error " + fmt(worst) + " (< " + fmt(kSimulatorTol) + "), " +
                fmt(secs, 3) + " s"};
}

// 2
Verdict qp_oracle() {
    const auto t0 = Clock::now();
    gen::Rng rng(2002);
    double worst_gap = -std::numeric_limits<double>::infinity();
    double worst_kkt = 0.0;
    std::size_t compared = 0;
    bool solved_all = true;
    for (int trial = 0; trial < 50; ++trial) {
        const auto k = static_cast<Eigen::Index>(1 + trial % 3);
        Eigen::VectorXd mu = gen::uniform_eigen(rng, k, -0.005, 0.01);
        double rho = mu(0);
        if (k > 1) {
            rho = mu.minCoeff() + gen::uniform(rng, 0.1, 0.9) * (mu.maxCoeff() - mu.minCoeff());
        }
        const auto p = frontier::QpProblem::long_only(gen::psd_matrix(rng, k), mu, rho);
        const auto x = frontier::solve_qp(p);
        if (!x) {
            solved_all = false;
            continue;
        }
        worst_kkt = std::max(worst_kkt, frontier::kkt_residual(p, *x));
        const auto grid = oracle::qp_grid(p.sigma, p.mu, p.rho, 0.0, 1.0, kGridStep);
        if (grid) {
            ++compared;
            worst_gap = std::max(worst_gap, x->risk * x->risk - grid->objective);
        }
    }
    const double secs = elapsed(t0);
    const bool pass = solved_all && compared > 0 && worst_gap <= kGridSlack && worst_kkt < kKktTol &&
                      secs < kQpSeconds;
    return {pass, "50 problems, kappa<=3: solver - grid objective <= " + fmt(worst_gap) + " (slack " +
                      fmt(kGridSlack) + ", " + std::to_string(compared) + " grid comparisons), max KKT residual " +
                      fmt(worst_kkt) + " (< " + fmt(kKktTol) + "), " + fmt(secs, 3) + " s"};
}

rbm::RbmParams random_rbm(gen::Rng &rng, std::size_t nv, std::size_t nh, double sd) {
    rbm::RbmParams p;
    p.vbias = gen::normal_matrix(rng, static_cast<Eigen::Index>(nv), 1, sd);
    p.hbias = gen::normal_matrix(rng, static_cast<Eigen::Index>(nh), 1, sd);
    p.weights = gen::normal_matrix(rng, static_cast<Eigen::Index>(nv), static_cast<Eigen::Index>(nh), sd);
    return p;
}

// 3
Verdict rbm_oracle() {
    const auto t0 = Clock::now();
    gen::Rng rng(3003);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t nv = 1 + static_cast<std::size_t>(trial) % 6;
        const std::size_t nh = 1 + static_cast<std::size_t>(trial / 6) % 3;
        const auto p = random_rbm(rng, nv, nh, 1.5);
        const auto fast = rbm::exact_visible_probs(p);
        const auto slow = oracle::rbm_bruteforce(p);
        for (std::size_t i = 0; i < fast.size(); ++i) {
            worst = std::max(worst, std::abs(fast[i] - slow[i]));
        }
    }
    const double secs = elapsed(t0);
    return {worst < kRbmTol && secs < kRbmSeconds,
            "100 parameter draws, N_v<=6: max probability error " + fmt(worst) + " (< " + fmt(kRbmTol) + "), " +
                fmt(secs, 3) + " s"};
}

// 4
Verdict gradient_check() {
    gen::Rng gr(4004);
    rbm::Rng rng(4004);
    double worst_z = 0.0;
    std::size_t outside = 0;
    std::size_t components = 0;
    for (int setting = 0; setting < 10; ++setting) {
        const auto p = random_rbm(gr, 2, 1, 1.0);
        // Data: 200 draws from a random distribution over the 4 visible states.
        std::vector<double> dist = gen::uniform_vector(gr, 4, 0.05, 1.0);
        const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
        for (double &d : dist) {
            d /= total;
        }
        const auto xs = rbm::sample_from(dist, 200, rng);
        std::vector<double> empirical(4, 0.0);
        for (auto x : xs) {
            empirical[x] += 1.0 / static_cast<double>(xs.size());
        }
        const auto exact = oracle::rbm_exact_gradient(p, empirical);

        std::vector<Bitstring> init(kGradChains);
        for (auto &x : init) {
            x = static_cast<Bitstring>(rng() % 4);
        }
        rbm::StateMatrix chains = rbm::states_from_bitstrings(init, 2);
        const auto batch = rbm::states_from_bitstrings(xs, 2);
        const auto g = rbm::pcd_gradient(p, batch, chains, kGradGibbs, rng);

        // Per-chain negative-phase statistics give the Monte Carlo standard errors.
        const Eigen::MatrixXd hm = rbm::hidden_means(p, chains);
        Eigen::MatrixXd stats(chains.rows(), 5);
        stats.col(0) = chains.col(0);
        stats.col(1) = chains.col(1);
        stats.col(2) = hm.col(0);
        stats.col(3) = chains.col(0).cwiseProduct(hm.col(0));
        stats.col(4) = chains.col(1).cwiseProduct(hm.col(0));
        const Eigen::RowVectorXd mean = stats.colwise().mean();
        const Eigen::RowVectorXd sd =
            ((stats.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(stats.rows() - 1))
                .sqrt();
        const double root_n = std::sqrt(static_cast<double>(stats.rows()));
        const std::vector<double> est{g.vbias(0), g.vbias(1), g.hbias(0), g.weights(0, 0), g.weights(1, 0)};
        const std::vector<double> ref{exact.vbias(0), exact.vbias(1), exact.hbias(0), exact.weights(0, 0),
                                      exact.weights(1, 0)};
        for (std::size_t c = 0; c < 5; ++c) {
            const double se = sd(static_cast<Eigen::Index>(c)) / root_n;
            const double diff = std::abs(est[c] - ref[c]);
            const double z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
            worst_z = std::max(worst_z, z);
            outside += z > kGradSigmas ? 1 : 0;
            ++components;
        }
    }
    return {outside == 0, "10 settings, N_v=2, N_h=1, k=100, 10^4 chains: " + std::to_string(outside) + " of " +
                              std::to_string(components) + " components beyond " + fmt(kGradSigmas) +
                              " standard errors (max " + fmt(worst_z, 3) + ")"};
}

// 5
Verdict example_reproduction() {
    std::vector<std::string> listed;
    for (Bitstring b : frontier::enumerate_subsets(4, 2)) {
        listed.push_back(to_bitstring(b, 4));
    }
    std::sort(listed.begin(), listed.end());
    const bool six = listed == std::vector<std::string>{"0011", "0101", "0110", "1001", "1010", "1100"};

    // Four synthetic assets; rho between the second and third mean returns
    // lies outside the attainable range of the lowest pair and the highest pair.
    const auto pm = market::synth_prices(market::SynthSpec{});
    const auto assets = market::select_subset(pm, 4, 5005);
    const auto stats = market::compute_stats(market::compute_returns(pm)).select(assets);
    std::vector<std::size_t> order(4);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return stats.mu(static_cast<Eigen::Index>(a)) < stats.mu(static_cast<Eigen::Index>(b));
    });
    const double rho = 0.5 * (stats.mu(static_cast<Eigen::Index>(order[1])) +
                              stats.mu(static_cast<Eigen::Index>(order[2])));
    const auto target = frontier::build_target(stats, 2, rho);
    const Bitstring low = bit_mask(order[0], 4) | bit_mask(order[1], 4);
    const Bitstring high = bit_mask(order[2], 4) | bit_mask(order[3], 4);
    std::string peaks;
    for (Bitstring b = 0; b < 16; ++b) {
        if (target.probs[b] > 0.0) {
            peaks += (peaks.empty() ? "" : ",") + to_bitstring(b, 4);
        }
    }
    const bool four = target.support_size() == 4 && target.probs[low] == 0.0 && target.probs[high] == 0.0;
    return {six && four, "N=4, kappa=2 lists " + std::to_string(listed.size()) +
                             " configurations (expected set: " + (six ? "yes" : "no") + "); rho=" + fmt(rho) +
                             " gives " + std::to_string(target.support_size()) + " peaks {" + peaks + "}"};
}

// 6
Verdict parameter_parity() {
    bool pass = true;
    std::string detail;
    const std::map<std::size_t, std::size_t> expected{{4, 14}, {6, 27}, {8, 44}, {10, 65}};
    for (const auto &[n, want] : expected) {
        const std::size_t q = qcbm::param_count(n);
        const std::size_t r = rbm::RbmParams::zeros(n, n / 2).param_count();
        pass = pass && q == want && r == want;
        detail += (detail.empty() ? "" : ", ") + ("N=" + std::to_string(n) + ": " + std::to_string(q) + "/" +
                                                  std::to_string(r));
    }
    return {pass, "QCBM/RBM parameters " + detail};
}

struct Store {
    harness::BenchConfig bench;
    harness::ScenarioSet scenarios;
    std::vector<harness::RunRecord> records;
    std::size_t failures = 0;
};

void print_progress(const harness::RunRecord &r, std::size_t done, std::size_t total) {
    std::cerr << "  [" << done << "/" << total << "] " << r.id << " kl=" << fmt(r.final_kl, 6) << " ("
              << fmt(r.wall_time_s, 3) << " s)" << (r.ok ? "" : " FAILED: " + r.error) << '\n';
}

Store train_store(const fs::path &dir) {
    Store s;
    harness::ResultStore store(dir);
    std::cerr << "benchmark store: " << dir << '\n';
    s.scenarios = harness::generate_scenarios(s.bench, harness::load_data(s.bench));
    const auto main = harness::run_benchmark(s.bench, s.scenarios, &store, print_progress);

    auto sweep = s.bench;
    sweep.sizes = {4};
    sweep.models = {harness::ModelKind::Rbm};
    sweep.k_gibbs = {1, 10, 100};
    const auto sweep_out = harness::run_benchmark(sweep, &store, print_progress);
    s.failures = main.failures + sweep_out.failures;
    s.records = store.load();
    return s;
}

std::vector<harness::RunRecord> select(const std::vector<harness::RunRecord> &all,
                                       const std::function<bool(const harness::RunRecord &)> &keep) {
    std::vector<harness::RunRecord> out;
    std::copy_if(all.begin(), all.end(), std::back_inserter(out), keep);
    return out;
}

// 7
Verdict trainability_floor(const Store &s) {
    std::map<std::string, std::size_t> below;
    std::map<std::string, std::size_t> total;
    double slowest = 0.0;
    for (const auto &sc : s.scenarios.scenarios) {
        if (sc.n == 4) {
            below[sc.id] = 0;
            total[sc.id] = 0;
        }
    }
    for (const auto &r : s.records) {
        if (r.model != harness::ModelKind::Qcbm || !below.contains(r.scenario_id)) {
            continue;
        }
        ++total[r.scenario_id];
        below[r.scenario_id] += r.ok && r.final_kl < r.baseline_kl ? 1 : 0;
        slowest = std::max(slowest, r.wall_time_s);
    }
    std::size_t worst = s.bench.repetitions;
    bool complete = !below.empty();
    for (const auto &[id, count] : below) {
        worst = std::min(worst, count);
        complete = complete && total[id] == s.bench.repetitions;
    }
    return {complete && worst >= kFloorMinReps && slowest < kRepetitionSeconds,
            std::to_string(below.size()) + " N=4 scenarios: fewest repetitions below the uniform baseline " +
                std::to_string(worst) + "/" + std::to_string(s.bench.repetitions) + " (need >= " +
                std::to_string(kFloorMinReps) + "), slowest repetition " + fmt(slowest, 3) + " s (< " +
                fmt(kRepetitionSeconds) + ")"};
}

// 8
Verdict scaling_direction(const Store &s, const fs::path &dir) {
    std::set<std::string> ids;
    for (const auto &sc : s.scenarios.scenarios) {
        ids.insert(sc.id);
    }
    const auto records = select(s.records, [&](const harness::RunRecord &r) {
        return ids.contains(r.scenario_id) && (r.model == harness::ModelKind::Qcbm || r.k_gibbs == 1);
    });
    double compute_s = 0.0;
    std::size_t failed = 0;
    for (const auto &r : records) {
        compute_s += r.wall_time_s;
        failed += r.ok ? 0 : 1;
    }
    const std::size_t expected = s.scenarios.scenarios.size() * s.bench.repetitions * 2;
    const double hours = compute_s / 3600.0;

    const auto rows = harness::summarize(records, s.bench.bootstrap_resamples, s.bench.seed);
    std::map<std::size_t, std::map<std::string, double>> med;
    for (const auto &row : rows) {
        med[row.n][row.model] = row.stats.median;
    }
    Verdict v;
    bool qcbm_wins = true;
    std::string table;
    std::map<std::size_t, double> gap;
    for (auto &[n, m] : med) {
        qcbm_wins = qcbm_wins && m["qcbm"] <= m["rbm"];
        gap[n] = (m["uniform"] - m["rbm"]) / m["uniform"];
        table += (table.empty() ? "" : "; ") + ("N=" + std::to_string(n) + " qcbm " + fmt(m["qcbm"]) + " rbm " +
                                                fmt(m["rbm"]) + " uniform " + fmt(m["uniform"]) + " gap " +
                                                fmt(gap[n], 3));
    }
    const bool shrinking = gap.contains(6) && gap.contains(8) && gap.contains(10) && gap[8] < gap[6] &&
                           gap[10] < gap[8];
    v.pass = records.size() == expected && failed == 0 && hours < kBenchmarkHours && qcbm_wins && shrinking;
    v.detail = std::to_string(records.size()) + "/" + std::to_string(expected) + " runs, " +
               std::to_string(failed) + " failed, " + fmt(hours, 3) + " h of compute (< " + fmt(kBenchmarkHours) +
               "); QCBM <= RBM at every N: " + (qcbm_wins ? "yes" : "no") +
               "; RBM relative gap to uniform shrinks N=6->8->10: " + (shrinking ? "yes" : "no");
    v.notes.push_back("bootstrap medians: " + table);

    const auto plots = harness::emit_plots(records, dir / "plots", dir / "targets", s.bench.bootstrap_resamples,
                                           s.bench.seed);
    for (const auto &[n, m] : med) {
        const auto q = harness::scenario_medians(records, harness::ModelKind::Qcbm, 0);
        const auto r = harness::scenario_medians(records, harness::ModelKind::Rbm, 1);
        std::size_t pairs = 0;
        std::size_t below = 0;
        for (const auto &sc : s.scenarios.scenarios) {
            if (sc.n == n && q.contains(sc.id) && r.contains(sc.id)) {
                ++pairs;
                below += q.at(sc.id) < r.at(sc.id) ? 1 : 0;
            }
        }
        v.notes.push_back("scatter N=" + std::to_string(n) + ": " + std::to_string(below) + "/" +
                          std::to_string(pairs) + " scenarios below the identity line (" +
                          (dir / "plots" / ("scatter_N" + std::to_string(n) + "_k1.tsv")).string() + ")");
    }
    if (!v.pass) {
        v.notes.push_back("directional check not met on synthetic data; see the per-scenario scatter above");
    }
    return v;
}

// 9
Verdict gibbs_sweep(const Store &s) {
    std::set<std::string> n4;
    for (const auto &sc : s.scenarios.scenarios) {
        if (sc.n == 4) {
            n4.insert(sc.id);
        }
    }
    std::map<std::size_t, std::map<std::string, double>> by_k;
    for (std::size_t k : {1U, 10U, 100U}) {
        by_k[k] = harness::scenario_medians(s.records, harness::ModelKind::Rbm, k);
    }
    std::size_t good = 0;
    std::size_t complete = 0;
    for (const auto &id : n4) {
        if (!by_k[1].contains(id) || !by_k[10].contains(id) || !by_k[100].contains(id)) {
            continue;
        }
        ++complete;
        good += by_k[1][id] >= by_k[10][id] && by_k[10][id] >= by_k[100][id] ? 1 : 0;
    }
    const double frac = n4.empty() ? 0.0 : static_cast<double>(good) / static_cast<double>(n4.size());
    return {complete == n4.size() && !n4.empty() && frac >= kSweepFraction,
            std::to_string(good) + "/" + std::to_string(n4.size()) +
                " N=4 scenarios have non-increasing median RBM KL over K=1,10,100 (" + fmt(100.0 * frac, 3) +
                "%, need >= " + fmt(100.0 * kSweepFraction) + "%)"};
}

// 10
Verdict determinism(const std::string &cli, const fs::path &dir) {
    const std::string args = " run --sizes 4 6 --subsets 1 --levels 0.001 0.002 --repetitions 2 --rbm-epochs 20 -q";
    std::vector<std::vector<std::string>> lines(2);
    for (int i = 0; i < 2; ++i) {
        const fs::path store = dir / ("determinism_" + std::to_string(i));
        fs::remove_all(store);
        const std::string cmd = "\"" + cli + "\"" + args + " -s \"" + store.string() + "\" > /dev/null";
        if (std::system(cmd.c_str()) != 0) {
            return {false, "qbench run exited with an error"};
        }
        auto records = harness::ResultStore(store).load();
        std::sort(records.begin(), records.end(), [](const auto &a, const auto &b) { return a.id < b.id; });
        for (const auto &r : records) {
            lines[i].push_back(harness::canonical_line(r));
        }
    }
    std::size_t same = 0;
    for (std::size_t i = 0; i < std::min(lines[0].size(), lines[1].size()); ++i) {
        same += lines[0][i] == lines[1][i] ? 1 : 0;
    }
    const bool pass = !lines[0].empty() && lines[0].size() == lines[1].size() && same == lines[0].size();
    return {pass, "two `qbench run` executions: " + std::to_string(same) + "/" + std::to_string(lines[0].size()) +
                      " records identical apart from wall time"};
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Acceptance criteria"};
    std::string store_dir;
    std::string cli;
    app.add_option("--store", store_dir, "Persistent result store for the full benchmark")->required();
    app.add_option("--cli", cli, "Path to the qbench executable")->required();
    CLI11_PARSE(app, argc, argv);

    int failed = 0;
    auto report = [&](int id, const std::string &name, const Verdict &v) {
        std::cout << (v.pass ? "PASS" : "FAIL") << "  " << id << ". " << name << ": " << v.detail << std::endl;
        for (const auto &note : v.notes) {
            std::cout << "        " << note << std::endl;
        }
        failed += v.pass ? 0 : 1;
    };
    auto guarded = [&](int id, const std::string &name, const std::function<Verdict()> &fn) {
        try {
            report(id, name, fn());
        } catch (const std::exception &e) {
            report(id, name, {false, std::string("exception: ") + e.what(), {}});
        }
    };

    guarded(1, "simulator oracle", simulator_oracle);
    guarded(2, "QP oracle", qp_oracle);
    guarded(3, "RBM oracle", rbm_oracle);
    guarded(4, "PCD gradient", gradient_check);
    guarded(5, "cardinality example", example_reproduction);
    guarded(6, "parameter parity", parameter_parity);

    std::optional<Store> store;
    try {
        store = train_store(store_dir);
    } catch (const std::exception &e) {
        for (int id : {7, 8, 9}) {
            report(id, "benchmark store", {false, std::string("exception: ") + e.what(), {}});
        }
    }
    if (store) {
        guarded(7, "trainability floor", [&] { return trainability_floor(*store); });
        guarded(8, "scaling direction", [&] { return scaling_direction(*store, store_dir); });
        guarded(9, "Gibbs depth sweep", [&] { return gibbs_sweep(*store); });
    }
    guarded(10, "determinism", [&] { return determinism(cli, fs::path(store_dir)); });

    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
