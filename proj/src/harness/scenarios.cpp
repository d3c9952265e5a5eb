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
#include <bit>
#include <sstream>

#include "qbench/common.hpp"
#include "qbench/errors.hpp"
#include "qbench/harness.hpp"

namespace qbench::harness {

std::string scenario_id(std::size_t n, std::size_t kappa, double rho, const std::vector<std::size_t> &assets,
                        std::uint64_t data_hash) {
    std::ostringstream key;
    key << "n=" << n << ";kappa=" << kappa << ";rho=" << hex64(std::bit_cast<std::uint64_t>(rho)) << ";assets=";
    for (std::size_t a : assets) {
        key << a << ',';
    }
    key << ";data=" << hex64(data_hash);
    Fnv1a h;
    h.update(key.str());
    return hex64(h.digest());
}

market::PriceMatrix load_data(const BenchConfig &cfg) {
    if (cfg.price_file) {
        return market::load_prices(*cfg.price_file);
    }
    return market::synth_prices(cfg.synth);
}

ScenarioSet generate_scenarios(const BenchConfig &cfg, const market::PriceMatrix &pm) {
    cfg.validate();
    std::size_t largest = 0;
    for (std::size_t n : cfg.sizes) {
        largest = std::max(largest, n);
    }
    if (pm.num_assets() < largest) {
        throw RangeError("price data has " + std::to_string(pm.num_assets()) + " assets but N = " +
                         std::to_string(largest) + " was requested");
    }
    const auto stats = market::compute_stats(market::compute_returns(pm));
    const std::uint64_t data_hash = pm.content_hash();

    ScenarioSet out;
    for (std::size_t n : cfg.sizes) {
        const std::size_t kappa = cfg.kappa_for(n);
        for (std::size_t s = 0; s < cfg.subsets_per_size; ++s) {
            const std::uint64_t subset_seed = derive_seed(cfg.seed, n, s);
            const auto assets = market::select_subset(pm, n, subset_seed);
            const auto sub = stats.select(assets);
            for (double rho : cfg.return_levels) {
                Scenario sc;
                sc.id = scenario_id(n, kappa, rho, assets, data_hash);
                sc.n = n;
                sc.kappa = kappa;
                sc.rho = rho;
                sc.subset_index = s;
                sc.subset_seed = subset_seed;
                sc.assets = assets;
                for (std::size_t a : assets) {
                    sc.tickers.push_back(pm.tickers()[a]);
                }
                sc.data_hash = data_hash;
                try {
                    sc.target = frontier::build_target(sub, kappa, rho, cfg.bounds);
                } catch (const NoFeasibleSubset &) {
                    std::ostringstream msg;
                    msg << "skipped scenario " << sc.id << " (N=" << n << ", kappa=" << kappa
                        << ", rho=" << rho << ", subset " << s << "): no feasible " << kappa
                        << "-asset portfolio attains the return level";
                    out.diagnostics.push_back(msg.str());
                    continue;
                } catch (const DegenerateError &e) {
                    std::ostringstream msg;
                    msg << "skipped scenario " << sc.id << " (N=" << n << ", rho=" << rho << ", subset " << s
                        << "): " << e.what();
                    out.diagnostics.push_back(msg.str());
                    continue;
                }
                sc.baseline_kl = metrics::uniform_baseline(sc.target, cfg.eps);
                out.scenarios.push_back(std::move(sc));
            }
        }
    }
    return out;
}

} // namespace qbench::harness
