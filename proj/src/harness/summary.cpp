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
#include <iomanip>
#include <limits>
#include <ostream>
#include <tuple>

#include "qbench/common.hpp"
#include "qbench/errors.hpp"
#include "qbench/harness.hpp"

namespace qbench::harness {

std::map<std::string, double> scenario_medians(const std::vector<RunRecord> &records, ModelKind model,
                                               std::size_t k_gibbs) {
    std::map<std::string, std::vector<double>> by_scenario;
    for (const auto &r : records) {
        if (r.ok && r.model == model && (model == ModelKind::Qcbm || r.k_gibbs == k_gibbs)) {
            by_scenario[r.scenario_id].push_back(r.final_kl);
        }
    }
    std::map<std::string, double> out;
    for (auto &[id, values] : by_scenario) {
        out[id] = metrics::median(values);
    }
    return out;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord> &records, std::size_t resamples,
                                  std::uint64_t seed) {
    if (records.empty()) {
        throw EmptyError("no run records to summarize");
    }
    // (n, model rank, k) -> scenario -> final KLs
    using Key = std::tuple<std::size_t, int, std::size_t>;
    std::map<Key, std::map<std::string, std::vector<double>>> groups;
    std::map<Key, std::size_t> failed;
    std::map<std::size_t, std::map<std::string, double>> baselines;
    for (const auto &r : records) {
        const Key key{r.n, r.model == ModelKind::Qcbm ? 0 : 1, r.k_gibbs};
        baselines[r.n][r.scenario_id] = r.baseline_kl;
        if (r.ok) {
            groups[key][r.scenario_id].push_back(r.final_kl);
        } else {
            ++failed[key];
            groups[key];
        }
    }

    std::vector<SummaryRow> rows;
    auto emit = [&](std::size_t n, std::string model, std::size_t k, const std::vector<double> &values,
                    std::size_t runs, std::size_t n_failed, std::uint64_t stream) {
        SummaryRow row;
        row.n = n;
        row.model = std::move(model);
        row.k_gibbs = k;
        row.scenarios = values.size();
        row.runs = runs;
        row.failed = n_failed;
        if (values.empty()) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.stats = {nan, nan, nan, 0};
        } else {
            row.stats = metrics::bootstrap_median(values, resamples, derive_seed(seed, n, stream));
        }
        rows.push_back(std::move(row));
    };

    for (const auto &[n, by_scenario] : baselines) {
        for (const auto &[key, scen] : groups) {
            if (std::get<0>(key) != n) {
                continue;
            }
            std::vector<double> medians;
            std::size_t runs = 0;
            for (const auto &[id, values] : scen) {
                medians.push_back(metrics::median(values));
                runs += values.size();
            }
            const int rank = std::get<1>(key);
            const std::size_t k = std::get<2>(key);
            emit(n, rank == 0 ? "qcbm" : "rbm", k, medians, runs, failed[key],
                 static_cast<std::uint64_t>(rank) * 1000003ULL + k + 1);
        }
        std::vector<double> base;
        for (const auto &[id, b] : by_scenario) {
            base.push_back(b);
        }
        emit(n, "uniform", 0, base, 0, 0, 0);
    }
    return rows;
}

void write_summary(std::ostream &out, const std::vector<SummaryRow> &rows) {
    out << "n\tmodel\tk_gibbs\tscenarios\truns\tfailed\tmedian\tp5\tp95\tresamples\n";
    out << std::setprecision(10);
    for (const auto &r : rows) {
        out << r.n << '\t' << r.model << '\t';
        if (r.model == "rbm") {
            out << r.k_gibbs;
        } else {
            out << '-';
        }
        out << '\t' << r.scenarios << '\t' << r.runs << '\t' << r.failed << '\t' << r.stats.median << '\t'
            << r.stats.p5 << '\t' << r.stats.p95 << '\t' << r.stats.resamples << '\n';
    }
}

} // namespace qbench::harness
