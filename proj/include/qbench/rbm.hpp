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

/// Binary restricted Boltzmann machine with energy
///
///     E(v, h) = θv·v + θh·h + v' W h,      P(v, h) = exp(-E(v, h)) / Z
///
/// Note the energy carries no leading minus signs, so every conditional is a
/// logistic of the *negated* field, e.g. P(h_j = 1 | v) = logistic(-θh_j - (v'W)_j).

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qbench/common.hpp"

namespace qbench::rbm {

using Rng = std::mt19937_64;
using BinaryVector = std::vector<std::uint8_t>;

struct RbmParams {
    Eigen::VectorXd vbias;
    Eigen::VectorXd hbias;
    Eigen::MatrixXd weights; ///< num_visible x num_hidden

    [[nodiscard]] static RbmParams zeros(std::size_t n_visible, std::size_t n_hidden);
    [[nodiscard]] std::size_t num_visible() const noexcept { return static_cast<std::size_t>(vbias.size()); }
    [[nodiscard]] std::size_t num_hidden() const noexcept { return static_cast<std::size_t>(hbias.size()); }
    [[nodiscard]] std::size_t param_count() const noexcept {
        return num_visible() + num_hidden() + num_visible() * num_hidden();
    }
    /// (vbias, hbias, row-major weights)
    [[nodiscard]] std::vector<double> flat() const;
    [[nodiscard]] bool all_finite() const;
};

/// Ascent direction on the log-likelihood, same shape as the parameters.
using Gradient = RbmParams;

struct TrainConfig {
    std::size_t k_gibbs = 1;
    double learning_rate = 0.05;
    std::size_t batch_size = 64;
    std::size_t epochs = 200;
    std::size_t n_chains = 64;
    std::uint64_t seed = 0;
    double init_weight_std = 0.01;

    void validate() const;
};

/// Observed samples as bitstrings (visible unit 0 is the most significant bit).
struct SampleData {
    std::vector<Bitstring> samples;
};

/// The data distribution itself; the positive phase is computed exactly.
struct ExactData {
    std::vector<double> probs;
    std::size_t updates_per_epoch = 1;
};

using TrainingData = std::variant<SampleData, ExactData>;

[[nodiscard]] double energy(const RbmParams &params, std::span<const std::uint8_t> v,
                            std::span<const std::uint8_t> h);

/// Unnormalized log marginal: -θv·v + Σ_j softplus(-θh_j - (v'W)_j).
[[nodiscard]] double log_unnormalized_visible(const RbmParams &params, Bitstring v);

/// P(v) for every visible configuration, indexed by bitstring.
[[nodiscard]] std::vector<double> exact_visible_probs(const RbmParams &params);

/// One full Gibbs sweep v -> h -> v'.
[[nodiscard]] BinaryVector gibbs_step(const RbmParams &params, std::span<const std::uint8_t> v, Rng &rng);

/// Rows are visible configurations with 0/1 entries.
using StateMatrix = Eigen::MatrixXd;

[[nodiscard]] StateMatrix states_from_bitstrings(std::span<const Bitstring> xs, std::size_t n_visible);

/// Advances every row of `chains` by k Gibbs sweeps in place.
void advance_chains(const RbmParams &params, StateMatrix &chains, std::size_t k, Rng &rng);

/// P(h_j = 1 | v) for every row.
[[nodiscard]] Eigen::MatrixXd hidden_means(const RbmParams &params, const StateMatrix &v);

/// PCD estimate of the log-likelihood gradient. Positive phase uses exact
/// hidden conditional means on `batch`; the persistent `chains` are advanced
/// k sweeps and then supply the negative phase.
[[nodiscard]] Gradient pcd_gradient(const RbmParams &params, const StateMatrix &batch,
                                    StateMatrix &chains, std::size_t k, Rng &rng);

/// Called after selected epochs with the 1-based epoch number.
using EpochObserver = std::function<void(std::size_t, const RbmParams &)>;

[[nodiscard]] RbmParams train_pcd(const TrainingData &data, const TrainConfig &cfg, std::size_t n_visible,
                                  std::size_t n_hidden, const EpochObserver &observer = {},
                                  std::size_t observe_every = 0);

/// Draws `count` bitstrings from a probability vector.
[[nodiscard]] std::vector<Bitstring> sample_from(std::span<const double> probs, std::size_t count, Rng &rng);

} // namespace qbench::rbm
