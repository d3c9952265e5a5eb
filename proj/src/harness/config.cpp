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
#include <cmath>
#include <stdexcept>

#include "qbench/errors.hpp"
#include "qbench/harness.hpp"
#include "qbench/qcbm.hpp"

namespace qbench::harness {

std::string to_string(ModelKind m) { return m == ModelKind::Qcbm ? "qcbm" : "rbm"; }

ModelKind parse_model(const std::string &s) {
    if (s == "qcbm") {
        return ModelKind::Qcbm;
    }
    if (s == "rbm") {
        return ModelKind::Rbm;
    }
    throw ConfigError("unknown model '" + s + "' (expected qcbm or rbm)");
}

std::vector<double> return_level_preset(const std::string &name) {
    const std::vector<double> a{0.010, 0.015, 0.020, 0.025, 0.030, 0.035};
    if (name == "A") {
        return a;
    }
    if (name == "B") {
        return {0.0010, 0.0015, 0.0020, 0.0025, 0.0030, 0.0035};
    }
    throw ConfigError("unknown return-level preset '" + name + "' (expected A or B)");
}

std::size_t BenchConfig::qcbm_budget_for(std::size_t n) const {
    if (qcbm_budget > 0) {
        return qcbm_budget;
    }
    const auto d = static_cast<double>(qcbm::param_count(n));
    return static_cast<std::size_t>(std::llround(qcbm_budget_factor * d * d));
}

void BenchConfig::validate() const {
    if (sizes.empty()) {
        throw ConfigError("no problem sizes");
    }
    for (std::size_t n : sizes) {
        if (n < 2 || n > 20) {
            throw ConfigError("problem size " + std::to_string(n) + " outside 2..20");
        }
        if (!kappa && n % 2 != 0) {
            throw ConfigError("kappa rule N/2 needs even sizes, got " + std::to_string(n));
        }
        const std::size_t k = kappa_for(n);
        if (k == 0 || k > n) {
            throw ConfigError("kappa out of range for N = " + std::to_string(n));
        }
    }
    if (return_levels.empty()) {
        throw ConfigError("no return levels");
    }
    if (subsets_per_size == 0 || repetitions == 0) {
        throw ConfigError("subsets per size and repetitions must be >= 1");
    }
    if (models.empty()) {
        throw ConfigError("no models selected");
    }
    if (k_gibbs.empty()) {
        throw ConfigError("no k_gibbs values");
    }
    for (std::size_t k : k_gibbs) {
        if (k == 0) {
            throw ConfigError("k_gibbs must be positive");
        }
    }
    if (!(qcbm_init_step > 0.0) || !(qcbm_budget_factor > 0.0)) {
        throw ConfigError("QCBM step and budget factor must be positive");
    }
    if (!(eps > 0.0)) {
        throw ConfigError("eps must be positive");
    }
    if (rbm_samples == 0 || bootstrap_resamples == 0) {
        throw ConfigError("sample and resample counts must be positive");
    }
    if (bounds.lower > bounds.upper) {
        throw ConfigError("lower weight bound exceeds upper bound");
    }
    rbm.validate();
}

} // namespace qbench::harness
