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
#include "qbench/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "qbench/errors.hpp"

namespace qbench::cmaes {

namespace {

constexpr double kEigenFloor = 1e-14;

double median_of_sorted(const std::vector<double> &v) {
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

Strategy Strategy::defaults(std::size_t dim) {
    if (dim == 0) {
        throw SizeError("CMA-ES needs at least one dimension");
    }
    Strategy s;
    const double n = static_cast<double>(dim);
    s.dim = dim;
    s.lambda = 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(n)));
    s.mu = s.lambda / 2;
    s.weights.resize(s.mu);
    for (std::size_t i = 0; i < s.mu; ++i) {
        s.weights[i] = std::log(static_cast<double>(s.mu) + 0.5) - std::log(static_cast<double>(i + 1));
    }
    const double total = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
    double sq = 0.0;
    for (double &w : s.weights) {
        w /= total;
        sq += w * w;
    }
    s.mu_eff = 1.0 / sq;
    s.c_sigma = (s.mu_eff + 2.0) / (n + s.mu_eff + 5.0);
    s.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((s.mu_eff - 1.0) / (n + 1.0)) - 1.0) + s.c_sigma;
    s.c_c = (4.0 + s.mu_eff / n) / (n + 4.0 + 2.0 * s.mu_eff / n);
    s.c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + s.mu_eff);
    s.c_mu = std::min(1.0 - s.c_1,
                      2.0 * (s.mu_eff - 2.0 + 1.0 / s.mu_eff) / ((n + 2.0) * (n + 2.0) + s.mu_eff));
    s.chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
    return s;
}

OptResult minimize(const Loss &loss, std::size_t dim, const Options &opts) {
    const Strategy st = Strategy::defaults(dim);
    if (opts.budget < st.lambda) {
        throw BudgetError("budget " + std::to_string(opts.budget) +
                          " is smaller than one generation (lambda = " + std::to_string(st.lambda) +
                          ")");
    }
    if (!(opts.init_step > 0.0)) {
        throw ConfigError("initial step size must be positive");
    }
    if (!opts.init_mean.empty() && opts.init_mean.size() != dim) {
        throw SizeError("initial mean has wrong dimension");
    }
    const auto d = static_cast<Eigen::Index>(dim);
    const auto lambda = static_cast<Eigen::Index>(st.lambda);

    CmaState state;
    state.mean = opts.init_mean.empty() ? Eigen::VectorXd::Zero(d)
                                        : Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(opts.init_mean.data(), d));
    state.step_size = opts.init_step;
    state.cov = Eigen::MatrixXd::Identity(d, d);
    state.path_sigma = Eigen::VectorXd::Zero(d);
    state.path_cov = Eigen::VectorXd::Zero(d);
    state.rng_seed = opts.seed;

    // C = B diag(D^2) B'
    Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd scales = Eigen::VectorXd::Ones(d);
    Eigen::MatrixXd inv_sqrt_cov = Eigen::MatrixXd::Identity(d, d);
    std::size_t eigen_eval = 0;

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    OptResult result;
    result.best_loss = std::numeric_limits<double>::infinity();

    Eigen::MatrixXd steps(d, lambda);
    Eigen::MatrixXd candidates(d, lambda);
    std::vector<double> losses(st.lambda);
    std::vector<std::size_t> order(st.lambda);

    while (result.evaluations + st.lambda <= opts.budget && state.step_size >= opts.min_step) {
        for (Eigen::Index k = 0; k < lambda; ++k) {
            Eigen::VectorXd z(d);
            for (Eigen::Index i = 0; i < d; ++i) {
                z(i) = normal(rng);
            }
            steps.col(k) = basis * scales.cwiseProduct(z);
            candidates.col(k) = state.mean + state.step_size * steps.col(k);
        }
        for (Eigen::Index k = 0; k < lambda; ++k) {
            const double f = loss(std::span<const double>(candidates.col(k).data(), dim));
            losses[static_cast<std::size_t>(k)] = std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
        }
        result.evaluations += st.lambda;

        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return losses[a] < losses[b]; });

        std::vector<double> sorted(st.lambda);
        for (std::size_t k = 0; k < st.lambda; ++k) {
            sorted[k] = losses[order[k]];
        }
        if (sorted.front() < result.best_loss) {
            result.best_loss = sorted.front();
            const auto best = candidates.col(static_cast<Eigen::Index>(order.front()));
            result.best_params.assign(best.data(), best.data() + d);
        }
        result.history.push_back({state.generation, sorted.front(), median_of_sorted(sorted)});

        // Recombination.
        Eigen::VectorXd step_w = Eigen::VectorXd::Zero(d);
        for (std::size_t i = 0; i < st.mu; ++i) {
            step_w += st.weights[i] * steps.col(static_cast<Eigen::Index>(order[i]));
        }
        state.mean += state.step_size * step_w;

        // Evolution paths.
        state.path_sigma = (1.0 - st.c_sigma) * state.path_sigma +
                           std::sqrt(st.c_sigma * (2.0 - st.c_sigma) * st.mu_eff) * (inv_sqrt_cov * step_w);
        const double gen = static_cast<double>(state.generation + 1);
        const double ps_norm = state.path_sigma.norm();
        const bool h_sigma =
            ps_norm / std::sqrt(1.0 - std::pow(1.0 - st.c_sigma, 2.0 * gen)) <
            (1.4 + 2.0 / (static_cast<double>(dim) + 1.0)) * st.chi_n;
        state.path_cov = (1.0 - st.c_c) * state.path_cov;
        if (h_sigma) {
            state.path_cov += std::sqrt(st.c_c * (2.0 - st.c_c) * st.mu_eff) * step_w;
        }

        // Covariance: rank-one plus rank-mu.
        Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(d, d);
        for (std::size_t i = 0; i < st.mu; ++i) {
            const auto y = steps.col(static_cast<Eigen::Index>(order[i]));
            rank_mu.noalias() += st.weights[i] * (y * y.transpose());
        }
        const double stall = h_sigma ? 0.0 : st.c_c * (2.0 - st.c_c);
        state.cov = (1.0 - st.c_1 - st.c_mu + st.c_1 * stall) * state.cov +
                    st.c_1 * (state.path_cov * state.path_cov.transpose()) + st.c_mu * rank_mu;

        state.step_size *= std::exp((st.c_sigma / st.d_sigma) * (ps_norm / st.chi_n - 1.0));
        ++state.generation;

        const double lag = static_cast<double>(st.lambda) / (st.c_1 + st.c_mu) /
                           static_cast<double>(dim) / 10.0;
        if (static_cast<double>(result.evaluations - eigen_eval) > lag) {
            eigen_eval = result.evaluations;
            state.cov = 0.5 * (state.cov + state.cov.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(state.cov);
            if (eig.info() != Eigen::Success || !eig.eigenvalues().allFinite()) {
                throw NumericalError("covariance eigendecomposition failed");
            }
            Eigen::VectorXd values = eig.eigenvalues();
            if (values.minCoeff() <= 0.0) {
                values = values.cwiseMax(kEigenFloor);
                state.cov = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
            }
            basis = eig.eigenvectors();
            scales = values.cwiseSqrt();
            inv_sqrt_cov = basis * scales.cwiseInverse().asDiagonal() * basis.transpose();
        }
        if (!std::isfinite(state.step_size) || !state.mean.allFinite()) {
            throw NumericalError("CMA-ES state became non-finite");
        }
    }

    result.final_state = std::move(state);
    return result;
}

} // namespace qbench::cmaes
