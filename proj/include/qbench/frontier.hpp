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

/// Cardinality-constrained Markowitz frontiers and the Boltzmann target
/// distribution built from them.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qbench/common.hpp"
#include "qbench/market_data.hpp"

namespace qbench::frontier {

/// min w'Σw  s.t.  μ·w = ρ,  Σw = 1,  lower ≤ w ≤ upper.
struct QpProblem {
    Eigen::MatrixXd sigma;
    Eigen::VectorXd mu;
    double rho = 0.0;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    /// Long-only, fully invested bounds [0, 1] for every asset.
    [[nodiscard]] static QpProblem long_only(Eigen::MatrixXd sigma, Eigen::VectorXd mu, double rho);
};

struct FrontierPoint {
    double rho = 0.0;
    double risk = 0.0; ///< standard deviation of the portfolio return
    Eigen::VectorXd weights;
    /// Multipliers of (budget, return) in the stationarity condition
    /// 2Σw = budget·1 + ret·μ + bound_multipliers.
    Eigen::Vector2d eq_multipliers = Eigen::Vector2d::Zero();
    /// Positive on active lower bounds, negative on active upper bounds, zero elsewhere.
    Eigen::VectorXd bound_multipliers;
    int iterations = 0;
};

/// Smallest and largest attainable return μ·w on {Σw = 1, lower ≤ w ≤ upper}.
/// Empty optional when the budget itself is unattainable.
[[nodiscard]] std::optional<std::pair<double, double>> attainable_returns(const QpProblem &p);

/// Primal active-set solve. Returns nullopt when the feasible set is empty.
[[nodiscard]] std::optional<FrontierPoint> solve_qp(const QpProblem &p);

/// Largest violation among stationarity, primal feasibility, dual sign and
/// complementarity conditions of a returned point.
[[nodiscard]] double kkt_residual(const QpProblem &p, const FrontierPoint &x);

/// All n-bit strings with exactly kappa ones, ascending.
[[nodiscard]] std::vector<Bitstring> enumerate_subsets(std::size_t n, std::size_t kappa);

/// sqrt of the mean of all covariance entries.
[[nodiscard]] double market_temperature(const market::ReturnStats &stats);

struct Bounds {
    double lower = 0.0;
    double upper = 1.0;
};

struct TargetDistribution {
    std::size_t n = 0;
    std::size_t kappa = 0;
    double rho = 0.0;
    double temperature = 0.0;
    std::vector<double> probs;

    /// Risk per cardinality-kappa subset, parallel to enumerate_subsets(n, kappa);
    /// nullopt where the QP is infeasible. Not part of the serialized record.
    std::vector<std::optional<double>> subset_risks;

    [[nodiscard]] std::size_t support_size() const;
};

/// Boltzmann weights exp(-risk/T) over the feasible cardinality-kappa subsets.
[[nodiscard]] TargetDistribution build_target(const market::ReturnStats &stats, std::size_t kappa,
                                              double rho, Bounds bounds = {});

/// Same as build_target with an explicit temperature.
[[nodiscard]] TargetDistribution build_target(const market::ReturnStats &stats, std::size_t kappa,
                                              double rho, Bounds bounds, double temperature);

/// Boltzmann normalization over given risks; infeasible entries get exactly 0.
[[nodiscard]] std::vector<double> boltzmann_weights(const std::vector<std::optional<double>> &risks,
                                                    double temperature);

[[nodiscard]] std::string to_json(const TargetDistribution &t);
[[nodiscard]] TargetDistribution target_from_json(const std::string &text);
void save_target(const std::filesystem::path &path, const TargetDistribution &t);
[[nodiscard]] TargetDistribution load_target(const std::filesystem::path &path);

} // namespace qbench::frontier
