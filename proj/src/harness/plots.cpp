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
#include <fstream>
#include <iomanip>
#include <set>

#include "qbench/common.hpp"
#include "qbench/errors.hpp"
#include "qbench/harness.hpp"

namespace qbench::harness {

namespace {

std::ofstream open_table(const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << std::setprecision(12);
    return out;
}

} // namespace

PlotOutput emit_plots(const std::vector<RunRecord> &records, const std::filesystem::path &out_dir,
                      const std::filesystem::path &target_dir, std::size_t resamples, std::uint64_t seed) {
    PlotOutput result;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    }

    std::set<std::size_t> sizes;
    std::set<std::size_t> rbm_ks;
    std::map<std::string, const RunRecord *> scenario_info;
    for (const auto &r : records) {
        if (r.ok) {
            sizes.insert(r.n);
            if (r.model == ModelKind::Rbm) {
                rbm_ks.insert(r.k_gibbs);
            }
        }
        scenario_info.emplace(r.scenario_id, &r);
    }
    if (sizes.empty()) {
        result.warnings.push_back("no successful records; nothing to plot");
        return result;
    }

    // (a) scaling: per-N bootstrap medians per model plus the uniform baseline.
    {
        std::vector<RunRecord> usable;
        for (const auto &r : records) {
            if (r.ok) {
                usable.push_back(r);
            }
        }
        const auto rows = summarize(usable, resamples, seed);
        const auto path = out_dir / "scaling.tsv";
        auto out = open_table(path);
        out << "# per-N bootstrap median of scenario-median D_KL; p5/p95 give the 90% interval\n";
        out << "n\tseries\tmedian\tp5\tp95\tscenarios\n";
        for (const auto &row : rows) {
            std::string series = row.model;
            if (row.model == "rbm") {
                series += "_k" + std::to_string(row.k_gibbs);
            }
            out << row.n << '\t' << series << '\t' << row.stats.median << '\t' << row.stats.p5 << '\t'
                << row.stats.p95 << '\t' << row.scenarios << '\n';
        }
        result.files.push_back(path);
    }

    // (b) scatter of scenario medians, one file per (N, k).
    const auto qcbm = scenario_medians(records, ModelKind::Qcbm, 0);
    for (std::size_t k : rbm_ks) {
        const auto rbm = scenario_medians(records, ModelKind::Rbm, k);
        for (std::size_t n : sizes) {
            std::vector<std::tuple<std::string, double, double, double>> points;
            for (const auto &[id, rbm_kl] : rbm) {
                auto q = qcbm.find(id);
                if (q == qcbm.end() || scenario_info.at(id)->n != n) {
                    continue;
                }
                points.emplace_back(id, scenario_info.at(id)->rho, rbm_kl, q->second);
            }
            if (points.empty()) {
                result.warnings.push_back("no paired QCBM/RBM scenarios for N=" + std::to_string(n) +
                                          ", k_gibbs=" + std::to_string(k) + "; scatter omitted");
                continue;
            }
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (const auto &p : points) {
                lo = std::min({lo, std::get<2>(p), std::get<3>(p)});
                hi = std::max({hi, std::get<2>(p), std::get<3>(p)});
            }
            const auto path = out_dir / ("scatter_N" + std::to_string(n) + "_k" + std::to_string(k) + ".tsv");
            auto out = open_table(path);
            out << "# x = RBM scenario-median D_KL, y = QCBM scenario-median D_KL\n";
            out << "# below_identity = 1 when QCBM scores lower than RBM\n";
            out << "# identity\t" << lo << '\t' << lo << '\t' << hi << '\t' << hi << '\n';
            out << "scenario_id\trho\trbm_kl\tqcbm_kl\tbelow_identity\n";
            for (const auto &[id, rho, x, y] : points) {
                out << id << '\t' << rho << '\t' << x << '\t' << y << '\t' << (y < x ? 1 : 0) << '\n';
            }
            result.files.push_back(path);
        }
    }
    if (rbm_ks.empty() || qcbm.empty()) {
        result.warnings.push_back("scatter data needs both QCBM and RBM records; omitted");
    }

    // (c) target distributions as bar data.
    if (!target_dir.empty()) {
        for (std::size_t n : sizes) {
            const auto path = out_dir / ("targets_N" + std::to_string(n) + ".tsv");
            std::ofstream *out_ptr = nullptr;
            std::ofstream out;
            for (const auto &[id, info] : scenario_info) {
                if (info->n != n) {
                    continue;
                }
                const auto file = target_dir / (id + ".target.json");
                if (!std::filesystem::exists(file)) {
                    result.warnings.push_back("missing target file for scenario " + id);
                    continue;
                }
                const auto t = frontier::load_target(file);
                if (out_ptr == nullptr) {
                    out = open_table(path);
                    out << "scenario_id\trho\tsubset_index\tbitstring\tprobability\n";
                    out_ptr = &out;
                }
                for (std::size_t x = 0; x < t.probs.size(); ++x) {
                    if (static_cast<std::size_t>(popcount(static_cast<Bitstring>(x))) == t.kappa) {
                        out << id << '\t' << t.rho << '\t' << info->subset_index << '\t'
                            << to_bitstring(static_cast<Bitstring>(x), t.n) << '\t' << t.probs[x] << '\n';
                    }
                }
            }
            if (out_ptr != nullptr) {
                result.files.push_back(path);
            }
        }
    }
    return result;
}

} // namespace qbench::harness
