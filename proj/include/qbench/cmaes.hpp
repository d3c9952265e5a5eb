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

/// (μ/μ_w, λ)-CMA-ES with cumulative step-size adaptation and rank-one plus
/// rank-μ covariance updates, using the standard default strategy parameters.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qbench::cmaes {

using Loss = std::function<double(std::span<const double>)>;

/// Strategy parameters derived from the dimension.
struct Strategy {
    std::size_t dim = 0;
    std::size_t lambda = 0;
    std::size_t mu = 0;
    std::vector<double> weights;
    double mu_eff = 0.0;
    double c_sigma = 0.0;
    double d_sigma = 0.0;
    double c_c = 0.0;
    double c_1 = 0.0;
    double c_mu = 0.0;
    double chi_n = 0.0;

    [[nodiscard]] static Strategy defaults(std::size_t dim);
};

struct CmaState {
    Eigen::VectorXd mean;
    double step_size = 0.0;
    Eigen::MatrixXd cov;
    Eigen::VectorXd path_sigma;
    Eigen::VectorXd path_cov;
    std::size_t generation = 0;
    std::uint64_t rng_seed = 0;
};

struct GenerationStats {
    std::size_t generation = 0;
    double best = 0.0;
    double median = 0.0;
};

struct OptResult {
    std::vector<double> best_params;
    double best_loss = 0.0;
    std::vector<GenerationStats> history;
    std::size_t evaluations = 0;
    CmaState final_state;
};

struct Options {
    std::size_t budget = 0;     ///< maximum loss evaluations
    std::uint64_t seed = 0;
    std::vector<double> init_mean; ///< empty means the zero vector
    double init_step = 0.3;
    double min_step = 1e-12;
};

[[nodiscard]] OptResult minimize(const Loss &loss, std::size_t dim, const Options &opts);

} // namespace qbench::cmaes
