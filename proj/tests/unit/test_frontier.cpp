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
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "oracles/oracles.hpp"
#include "qbench/errors.hpp"
#include "qbench/frontier.hpp"
#include "support/gen.hpp"

using namespace qbench;
using namespace qbench::frontier;

namespace {

market::ReturnStats stats_of(Eigen::MatrixXd sigma, Eigen::VectorXd mu) {
    return market::ReturnStats{std::move(mu), std::move(sigma)};
}

std::vector<std::string> printed(const std::vector<Bitstring> &xs, std::size_t n) {
    std::vector<std::string> out;
    for (auto x : xs) {
        out.push_back(to_bitstring(x, n));
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// A random problem whose target return lies inside the attainable interval.
QpProblem random_problem(gen::Rng &rng, Eigen::Index k) {
    Eigen::VectorXd mu = gen::uniform_eigen(rng, k, -0.005, 0.01);
    const double lo = mu.minCoeff();
    const double hi = mu.maxCoeff();
    const double rho = lo + gen::uniform(rng, 0.1, 0.9) * (hi - lo);
    return QpProblem::long_only(gen::psd_matrix(rng, k), std::move(mu), rho);
}

} // namespace

TEST_CASE("solve_qp: equal returns split evenly") {
    for (double rho : {-0.3, 0.0, 0.02, 1.5}) {
        Eigen::Vector2d mu(rho, rho);
        const auto x = solve_qp(QpProblem::long_only(Eigen::Matrix2d::Identity(), mu, rho));
        REQUIRE(x);
        CHECK(x->weights(0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(x->weights(1) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(x->risk == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    }
}

TEST_CASE("solve_qp: single asset and infeasible return") {
    Eigen::MatrixXd s(1, 1);
    s << 0.04;
    Eigen::VectorXd m(1);
    m << 0.003;
    const auto x = solve_qp(QpProblem::long_only(s, m, 0.003));
    REQUIRE(x);
    CHECK(x->weights(0) == doctest::Approx(1.0));
    CHECK(x->risk == doctest::Approx(0.2));

    Eigen::Vector2d mu(0.01, 0.02);
    CHECK_FALSE(solve_qp(QpProblem::long_only(Eigen::Matrix2d::Identity(), mu, 0.05)));
    CHECK_FALSE(solve_qp(QpProblem::long_only(Eigen::Matrix2d::Identity(), mu, 0.005)));
    const auto range = attainable_returns(QpProblem::long_only(Eigen::Matrix2d::Identity(), mu, 0.0));
    REQUIRE(range);
    CHECK(range->first == doctest::Approx(0.01));
    CHECK(range->second == doctest::Approx(0.02));
}

TEST_CASE("solve_qp: non-trivial bounds are honoured") {
    gen::Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        QpProblem p = random_problem(rng, 4);
        p.lower = Eigen::VectorXd::Constant(4, 0.05);
        p.upper = Eigen::VectorXd::Constant(4, 0.6);
        const auto range = attainable_returns(p);
        REQUIRE(range);
        p.rho = 0.5 * (range->first + range->second);
        const auto x = solve_qp(p);
        REQUIRE(x);
        CHECK(x->weights.minCoeff() >= 0.05 - 1e-12);
        CHECK(x->weights.maxCoeff() <= 0.6 + 1e-12);
        CHECK(kkt_residual(p, *x) < 1e-8);
    }
}

TEST_CASE("property: solve_qp beats the simplex grid and satisfies KKT") {
    gen::Rng rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const Eigen::Index k = 1 + trial % 3;
        QpProblem p = random_problem(rng, k);
        if (k == 1) {
            p.rho = p.mu(0);
        }
        const auto x = solve_qp(p);
        REQUIRE(x);
        CHECK(kkt_residual(p, *x) < 1e-8);
        const auto grid = oracle::qp_grid(p.sigma, p.mu, p.rho, 0.0, 1.0, 1e-3);
        if (grid) {
            CHECK(x->risk * x->risk <= grid->objective + 1e-5);
        }
    }
}

TEST_CASE("property: the full frontier envelopes every subset frontier") {
    gen::Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5;
        const QpProblem full = random_problem(rng, static_cast<Eigen::Index>(n));
        const auto x = solve_qp(full);
        REQUIRE(x);
        for (Bitstring s : enumerate_subsets(n, 2)) {
            std::vector<Eigen::Index> idx;
            for (std::size_t i = 0; i < n; ++i) {
                if (bit_at(s, i, n)) {
                    idx.push_back(static_cast<Eigen::Index>(i));
                }
            }
            const auto sub = solve_qp(QpProblem::long_only(full.sigma(idx, idx), full.mu(idx), full.rho));
            if (sub) {
                CHECK(x->risk <= sub->risk + 1e-12);
            }
        }
    }
}

TEST_CASE("enumerate_subsets lists every cardinality-kappa string") {
    CHECK(printed(enumerate_subsets(4, 2), 4) ==
          std::vector<std::string>{"0011", "0101", "0110", "1001", "1010", "1100"});
    CHECK(printed(enumerate_subsets(4, 4), 4) == std::vector<std::string>{"1111"});
    CHECK(enumerate_subsets(6, 3).size() == 20);
    const auto ten = enumerate_subsets(10, 5);
    CHECK(ten.size() == 252);
    CHECK(std::is_sorted(ten.begin(), ten.end()));
    CHECK(std::all_of(ten.begin(), ten.end(), [](Bitstring b) { return popcount(b) == 5; }));
    CHECK_THROWS_AS(enumerate_subsets(4, 0), RangeError);
    CHECK_THROWS_AS(enumerate_subsets(4, 5), RangeError);
}

TEST_CASE("market_temperature is the root mean covariance entry") {
    Eigen::MatrixXd one(1, 1);
    one << 4.0;
    CHECK(market_temperature(stats_of(one, Eigen::VectorXd::Zero(1))) == doctest::Approx(2.0));
    CHECK(market_temperature(stats_of(Eigen::MatrixXd::Ones(2, 2), Eigen::VectorXd::Zero(2))) ==
          doctest::Approx(1.0));
    Eigen::Matrix2d anti;
    anti << 1, -1, -1, 1;
    CHECK_THROWS_AS(market_temperature(stats_of(anti, Eigen::VectorXd::Zero(2))), DegenerateError);
}

TEST_CASE("boltzmann_weights") {
    const auto even = boltzmann_weights({0.3, 0.3}, 0.1);
    CHECK(even[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(even[1] == doctest::Approx(0.5).epsilon(1e-15));

    const double t = 0.7;
    const auto w = boltzmann_weights({0.0, t * std::log(2.0)}, t);
    CHECK(w[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    const auto gap = boltzmann_weights({std::nullopt, 0.2, std::nullopt}, 1.0);
    CHECK(gap[0] == 0.0);
    CHECK(gap[1] == 1.0);
    CHECK(gap[2] == 0.0);
    CHECK_THROWS_AS(boltzmann_weights({std::nullopt, std::nullopt}, 1.0), NoFeasibleSubset);
    CHECK_THROWS_AS(boltzmann_weights({0.1}, 0.0), RangeError);
}

TEST_CASE("property: scaling risks and temperature together is invisible") {
    gen::Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto risks = gen::uniform_vector(rng, 10, 0.001, 0.05);
        const double t = gen::uniform(rng, 0.001, 0.05);
        const double c = gen::uniform(rng, 0.01, 100.0);
        std::vector<std::optional<double>> a;
        std::vector<std::optional<double>> b;
        for (std::size_t i = 0; i < risks.size(); ++i) {
            a.emplace_back(i % 4 == 3 ? std::nullopt : std::optional<double>(risks[i]));
            b.emplace_back(i % 4 == 3 ? std::nullopt : std::optional<double>(risks[i] * c));
        }
        const auto pa = boltzmann_weights(a, t);
        const auto pb = boltzmann_weights(b, t * c);
        for (std::size_t i = 0; i < pa.size(); ++i) {
            CHECK(std::abs(pa[i] - pb[i]) < 1e-12);
        }
    }
}

TEST_CASE("a return level above two pairs leaves four peaks") {
    Eigen::Vector4d mu(0.001, 0.002, 0.003, 0.004);
    Eigen::Matrix4d sigma = Eigen::Matrix4d::Identity() * 1e-4;
    sigma(0, 1) = sigma(1, 0) = 2e-5;
    const auto t = build_target(stats_of(sigma, mu), 2, 0.0025);
    CHECK(t.support_size() == 4);
    std::vector<std::string> peaks;
    for (Bitstring x = 0; x < 16; ++x) {
        if (t.probs[x] > 0.0) {
            peaks.push_back(to_bitstring(x, 4));
        }
    }
    CHECK(peaks == std::vector<std::string>{"0101", "0110", "1001", "1010"});
    CHECK(t.probs[from_bitstring("1100")] == 0.0);
    CHECK(t.probs[from_bitstring("0011")] == 0.0);
}

TEST_CASE("property: build_target sums to one and follows asset relabeling") {
    gen::Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 4 + trial % 3;
        const auto k = static_cast<Eigen::Index>(n);
        const Eigen::MatrixXd sigma = gen::psd_matrix(rng, k);
        const Eigen::VectorXd mu = gen::uniform_eigen(rng, k, -0.002, 0.006);
        const double rho = gen::uniform(rng, 0.0, 0.004);
        TargetDistribution t;
        try {
            t = build_target(stats_of(sigma, mu), n / 2, rho);
        } catch (const NoFeasibleSubset &) {
            continue;
        }
        const double total = std::accumulate(t.probs.begin(), t.probs.end(), 0.0);
        CHECK(std::abs(total - 1.0) < 1e-12);

        // New asset i is old asset perm[i].
        const auto perm = gen::permutation(rng, n);
        std::vector<Eigen::Index> idx(perm.begin(), perm.end());
        const auto u = build_target(stats_of(sigma(idx, idx), mu(idx)), n / 2, rho);
        for (Bitstring b = 0; b < (Bitstring{1} << n); ++b) {
            Bitstring old = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (bit_at(b, i, n)) {
                    old |= bit_mask(perm[i], n);
                }
            }
            CHECK(std::abs(u.probs[b] - t.probs[old]) < 1e-12);
        }
        const auto argmax = [](const std::vector<double> &p) {
            return static_cast<Bitstring>(std::max_element(p.begin(), p.end()) - p.begin());
        };
        const Bitstring am = argmax(u.probs);
        Bitstring am_old = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (bit_at(am, i, n)) {
                am_old |= bit_mask(perm[i], n);
            }
        }
        CHECK(t.probs[am_old] == t.probs[argmax(t.probs)]);
    }
}

TEST_CASE("target JSON round trip") {
    Eigen::Vector4d mu(0.001, 0.002, 0.003, 0.004);
    const auto t = build_target(stats_of(Eigen::Matrix4d::Identity() * 1e-4, mu), 2, 0.0025);
    const auto u = target_from_json(to_json(t));
    CHECK(u.n == t.n);
    CHECK(u.kappa == t.kappa);
    CHECK(u.rho == t.rho);
    CHECK(u.temperature == t.temperature);
    CHECK(u.probs == t.probs);

    const auto path = std::filesystem::temp_directory_path() / "qbench_test_target.json";
    save_target(path, t);
    CHECK(load_target(path).probs == t.probs);
    std::filesystem::remove(path);
    CHECK_THROWS(target_from_json("{\"n\": 2}"));
}
