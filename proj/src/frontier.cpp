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
#include "qbench/frontier.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qbench/errors.hpp"

namespace qbench::frontier {

std::vector<Bitstring> enumerate_subsets(std::size_t n, std::size_t kappa) {
    if (kappa == 0 || kappa > n) {
        throw RangeError("cardinality must satisfy 0 < kappa <= n");
    }
    if (n > 24) {
        throw RangeError("subset enumeration limited to n <= 24");
    }
    std::vector<Bitstring> out;
    const Bitstring end = Bitstring{1} << n;
    for (Bitstring x = 0; x < end; ++x) {
        if (static_cast<std::size_t>(popcount(x)) == kappa) {
            out.push_back(x);
        }
    }
    return out;
}

double market_temperature(const market::ReturnStats &stats) {
    const double mean = stats.sigma.mean();
    if (!(mean > 0.0)) {
        throw DegenerateError("mean covariance entry is not positive; temperature undefined");
    }
    return std::sqrt(mean);
}

std::size_t TargetDistribution::support_size() const {
    std::size_t k = 0;
    for (double p : probs) {
        k += p > 0.0 ? 1 : 0;
    }
    return k;
}

std::vector<double> boltzmann_weights(const std::vector<std::optional<double>> &risks,
                                      double temperature) {
    if (!(temperature > 0.0)) {
        throw RangeError("temperature must be positive");
    }
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto &r : risks) {
        if (r) {
            lowest = std::min(lowest, *r);
        }
    }
    if (!std::isfinite(lowest)) {
        throw NoFeasibleSubset("no feasible subset");
    }
    // Shifting by the lowest risk cancels in the normalization.
    std::vector<double> w(risks.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < risks.size(); ++i) {
        if (risks[i]) {
            w[i] = std::exp(-(*risks[i] - lowest) / temperature);
            total += w[i];
        }
    }
    for (double &x : w) {
        x /= total;
    }
    return w;
}

TargetDistribution build_target(const market::ReturnStats &stats, std::size_t kappa, double rho,
                                Bounds bounds) {
    return build_target(stats, kappa, rho, bounds, market_temperature(stats));
}

TargetDistribution build_target(const market::ReturnStats &stats, std::size_t kappa, double rho,
                                Bounds bounds, double temperature) {
    const std::size_t n = stats.size();
    const auto subsets = enumerate_subsets(n, kappa);

    TargetDistribution t;
    t.n = n;
    t.kappa = kappa;
    t.rho = rho;
    t.temperature = temperature;
    t.subset_risks.reserve(subsets.size());
    for (Bitstring x : subsets) {
        std::vector<std::size_t> assets;
        for (std::size_t i = 0; i < n; ++i) {
            if (bit_at(x, i, n)) {
                assets.push_back(i);
            }
        }
        const auto sub = stats.select(assets);
        const auto k = static_cast<Eigen::Index>(kappa);
        QpProblem qp{sub.sigma, sub.mu, rho, Eigen::VectorXd::Constant(k, bounds.lower),
                     Eigen::VectorXd::Constant(k, bounds.upper)};
        const auto point = solve_qp(qp);
        t.subset_risks.push_back(point ? std::optional<double>(point->risk) : std::nullopt);
    }

    const auto weights = boltzmann_weights(t.subset_risks, temperature);
    t.probs.assign(std::size_t{1} << n, 0.0);
    for (std::size_t s = 0; s < subsets.size(); ++s) {
        t.probs[subsets[s]] = weights[s];
    }
    return t;
}

std::string to_json(const TargetDistribution &t) {
    nlohmann::ordered_json j;
    j["n"] = t.n;
    j["kappa"] = t.kappa;
    j["rho"] = t.rho;
    j["temperature"] = t.temperature;
    j["probs"] = t.probs;
    return j.dump();
}

TargetDistribution target_from_json(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("target record: ") + e.what(), 1, 1);
    }
    TargetDistribution t;
    try {
        t.n = j.at("n").get<std::size_t>();
        t.kappa = j.at("kappa").get<std::size_t>();
        t.rho = j.at("rho").get<double>();
        t.temperature = j.at("temperature").get<double>();
        t.probs = j.at("probs").get<std::vector<double>>();
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("target record: ") + e.what());
    }
    if (t.probs.size() != (std::size_t{1} << t.n)) {
        throw ValidationError("target record: probs length is not 2^n");
    }
    return t;
}

void save_target(const std::filesystem::path &path, const TargetDistribution &t) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << to_json(t) << '\n';
}

TargetDistribution load_target(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return target_from_json(ss.str());
}

} // namespace qbench::frontier
