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

// Hand-rolled random generators for property tests.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng &rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::vector<double> uniform_vector(Rng &rng, std::size_t n, double lo, double hi) {
    std::vector<double> out(n);
    for (double &x : out) {
        x = uniform(rng, lo, hi);
    }
    return out;
}

inline Eigen::VectorXd uniform_eigen(Rng &rng, Eigen::Index n, double lo, double hi) {
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i) = uniform(rng, lo, hi);
    }
    return out;
}

inline Eigen::MatrixXd normal_matrix(Rng &rng, Eigen::Index rows, Eigen::Index cols, double sd) {
    std::normal_distribution<double> nd(0.0, sd);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = nd(rng);
        }
    }
    return m;
}

/// Random covariance of the form A Aᵀ / k + jitter·I, scaled to typical daily-return magnitudes.
inline Eigen::MatrixXd psd_matrix(Rng &rng, Eigen::Index k, double scale = 1e-4) {
    const Eigen::MatrixXd a = normal_matrix(rng, k, k + 2, 1.0);
    Eigen::MatrixXd s = a * a.transpose() / static_cast<double>(k + 2);
    s.diagonal().array() += 0.01;
    return scale * s;
}

inline std::vector<std::size_t> permutation(Rng &rng, std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = i;
    }
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

} // namespace gen
