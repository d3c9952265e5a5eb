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
#include "qbench/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qbench/errors.hpp"

namespace qbench::rbm {

namespace {

constexpr std::size_t kMaxExactVisible = 20;

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double uniform01(Rng &rng) { return std::generate_canonical<double, 53>(rng); }

void check_shapes(const RbmParams &p) {
    if (p.weights.rows() != p.vbias.size() || p.weights.cols() != p.hbias.size()) {
        throw SizeError("weight matrix does not match bias lengths");
    }
}

// Bernoulli draw per entry with P(1) = logistic(field).
void sample_logistic(Eigen::MatrixXd &field, Rng &rng) {
    for (Eigen::Index c = 0; c < field.cols(); ++c) {
        for (Eigen::Index r = 0; r < field.rows(); ++r) {
            field(r, c) = uniform01(rng) < logistic(field(r, c)) ? 1.0 : 0.0;
        }
    }
}

// Every binary state of `width` units, one per row, in index order.
Eigen::MatrixXd all_states(std::size_t width) {
    const std::size_t count = std::size_t{1} << width;
    Eigen::MatrixXd out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(width));
    for (std::size_t x = 0; x < count; ++x) {
        for (std::size_t i = 0; i < width; ++i) {
            out(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(i)) =
                bit_at(static_cast<Bitstring>(x), i, width) ? 1.0 : 0.0;
        }
    }
    return out;
}

// P(1) as a threshold on a raw 64-bit draw: the unit fires when rng() < threshold.
std::vector<std::uint64_t> thresholds(const Eigen::MatrixXd &field) {
    std::vector<std::uint64_t> out(static_cast<std::size_t>(field.size()));
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < field.rows(); ++r) {
        for (Eigen::Index c = 0; c < field.cols(); ++c) {
            const double p = logistic(field(r, c));
            out[k++] = p >= 1.0 ? std::numeric_limits<std::uint64_t>::max()
                                : static_cast<std::uint64_t>(std::ldexp(p, 64));
        }
    }
    return out;
}

// Gibbs sweeps with both conditionals looked up by the integer code of the
// conditioning layer.
void advance_tabulated(const RbmParams &params, StateMatrix &chains, std::size_t k, Rng &rng) {
    const std::size_t nv = params.num_visible();
    const std::size_t nh = params.num_hidden();
    const auto t_hidden =
        thresholds(-((all_states(nv) * params.weights).rowwise() + params.hbias.transpose()));
    const auto t_visible =
        thresholds(-((all_states(nh) * params.weights.transpose()).rowwise() + params.vbias.transpose()));
    for (Eigen::Index r = 0; r < chains.rows(); ++r) {
        std::size_t v = 0;
        for (std::size_t i = 0; i < nv; ++i) {
            v = (v << 1U) | (chains(r, static_cast<Eigen::Index>(i)) > 0.5 ? 1U : 0U);
        }
        for (std::size_t step = 0; step < k; ++step) {
            const std::uint64_t *th = &t_hidden[v * nh];
            std::size_t h = 0;
            for (std::size_t j = 0; j < nh; ++j) {
                h = (h << 1U) | (rng() < th[j] ? 1U : 0U);
            }
            const std::uint64_t *tv = &t_visible[h * nv];
            v = 0;
            for (std::size_t i = 0; i < nv; ++i) {
                v = (v << 1U) | (rng() < tv[i] ? 1U : 0U);
            }
        }
        for (std::size_t i = 0; i < nv; ++i) {
            chains(r, static_cast<Eigen::Index>(i)) = bit_at(static_cast<Bitstring>(v), i, nv) ? 1.0 : 0.0;
        }
    }
}

// Accumulates sign * (mean v, mean E[h|v], mean v'E[h|v]) into g.
void add_phase(const RbmParams &params, const StateMatrix &v, double sign, Gradient &g) {
    const Eigen::MatrixXd hm = hidden_means(params, v);
    const double scale = sign / static_cast<double>(v.rows());
    g.vbias += scale * v.colwise().sum().transpose();
    g.hbias += scale * hm.colwise().sum().transpose();
    g.weights.noalias() += scale * (v.transpose() * hm);
}

} // namespace

RbmParams RbmParams::zeros(std::size_t n_visible, std::size_t n_hidden) {
    const auto nv = static_cast<Eigen::Index>(n_visible);
    const auto nh = static_cast<Eigen::Index>(n_hidden);
    return {Eigen::VectorXd::Zero(nv), Eigen::VectorXd::Zero(nh), Eigen::MatrixXd::Zero(nv, nh)};
}

std::vector<double> RbmParams::flat() const {
    std::vector<double> out(vbias.data(), vbias.data() + vbias.size());
    out.insert(out.end(), hbias.data(), hbias.data() + hbias.size());
    for (Eigen::Index i = 0; i < weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < weights.cols(); ++j) {
            out.push_back(weights(i, j));
        }
    }
    return out;
}

bool RbmParams::all_finite() const {
    return vbias.allFinite() && hbias.allFinite() && weights.allFinite();
}

void TrainConfig::validate() const {
    if (k_gibbs == 0 || batch_size == 0 || epochs == 0 || n_chains == 0 || !(learning_rate > 0.0) ||
        !(init_weight_std >= 0.0)) {
        throw ConfigError("RBM training configuration entries must be positive");
    }
}

double energy(const RbmParams &params, std::span<const std::uint8_t> v, std::span<const std::uint8_t> h) {
    check_shapes(params);
    if (v.size() != params.num_visible() || h.size() != params.num_hidden()) {
        throw SizeError("state sizes do not match the RBM");
    }
    double e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0U) {
            continue;
        }
        e += params.vbias(static_cast<Eigen::Index>(i));
        for (std::size_t j = 0; j < h.size(); ++j) {
            if (h[j] != 0U) {
                e += params.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
    }
    for (std::size_t j = 0; j < h.size(); ++j) {
        if (h[j] != 0U) {
            e += params.hbias(static_cast<Eigen::Index>(j));
        }
    }
    return e;
}

double log_unnormalized_visible(const RbmParams &params, Bitstring v) {
    const std::size_t nv = params.num_visible();
    Eigen::VectorXd field = -params.hbias;
    double linear = 0.0;
    for (std::size_t i = 0; i < nv; ++i) {
        if (bit_at(v, i, nv)) {
            const auto ii = static_cast<Eigen::Index>(i);
            linear -= params.vbias(ii);
            field -= params.weights.row(ii).transpose();
        }
    }
    double s = linear;
    for (Eigen::Index j = 0; j < field.size(); ++j) {
        s += softplus(field(j));
    }
    return s;
}

std::vector<double> exact_visible_probs(const RbmParams &params) {
    check_shapes(params);
    const std::size_t nv = params.num_visible();
    if (nv == 0 || nv > kMaxExactVisible) {
        throw SizeError("exact marginal limited to 1..20 visible units, got " + std::to_string(nv));
    }
    const std::size_t dim = std::size_t{1} << nv;
    std::vector<double> logp(dim);
    for (std::size_t x = 0; x < dim; ++x) {
        logp[x] = log_unnormalized_visible(params, static_cast<Bitstring>(x));
    }
    const double top = *std::max_element(logp.begin(), logp.end());
    double z = 0.0;
    for (double &l : logp) {
        l = std::exp(l - top);
        z += l;
    }
    for (double &l : logp) {
        l /= z;
    }
    return logp;
}

Eigen::MatrixXd hidden_means(const RbmParams &params, const StateMatrix &v) {
    Eigen::MatrixXd field = -((v * params.weights).rowwise() + params.hbias.transpose());
    return field.unaryExpr([](double x) { return logistic(x); });
}

BinaryVector gibbs_step(const RbmParams &params, std::span<const std::uint8_t> v, Rng &rng) {
    check_shapes(params);
    if (v.size() != params.num_visible()) {
        throw SizeError("visible state size does not match the RBM");
    }
    StateMatrix state(1, static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        state(0, static_cast<Eigen::Index>(i)) = v[i] != 0U ? 1.0 : 0.0;
    }
    advance_chains(params, state, 1, rng);
    BinaryVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = state(0, static_cast<Eigen::Index>(i)) > 0.5 ? 1 : 0;
    }
    return out;
}

StateMatrix states_from_bitstrings(std::span<const Bitstring> xs, std::size_t n_visible) {
    StateMatrix m(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(n_visible));
    for (std::size_t r = 0; r < xs.size(); ++r) {
        for (std::size_t i = 0; i < n_visible; ++i) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = bit_at(xs[r], i, n_visible) ? 1.0 : 0.0;
        }
    }
    return m;
}

void advance_chains(const RbmParams &params, StateMatrix &chains, std::size_t k, Rng &rng) {
    check_shapes(params);
    if (chains.cols() != params.vbias.size()) {
        throw SizeError("chain width does not match the RBM");
    }
    const std::size_t nv = params.num_visible();
    const std::size_t nh = params.num_hidden();
    if (nv <= 16 && nh <= 16) {
        const double table_cost = static_cast<double>((std::size_t{1} << nv) * nh + (std::size_t{1} << nh) * nv);
        const double sweep_cost = static_cast<double>(k) * static_cast<double>(chains.rows()) *
                                  static_cast<double>(nv + nh);
        if (table_cost < sweep_cost) {
            advance_tabulated(params, chains, k, rng);
            return;
        }
    }
    Eigen::MatrixXd hidden;
    for (std::size_t step = 0; step < k; ++step) {
        hidden = -((chains * params.weights).rowwise() + params.hbias.transpose());
        sample_logistic(hidden, rng);
        chains = -((hidden * params.weights.transpose()).rowwise() + params.vbias.transpose());
        sample_logistic(chains, rng);
    }
}

Gradient pcd_gradient(const RbmParams &params, const StateMatrix &batch, StateMatrix &chains,
                      std::size_t k, Rng &rng) {
    check_shapes(params);
    if (batch.cols() != params.vbias.size() || chains.cols() != params.vbias.size()) {
        throw SizeError("batch or chain width does not match the RBM");
    }
    if (batch.rows() == 0 || chains.rows() == 0) {
        throw SizeError("empty batch or chain set");
    }
    Gradient g = RbmParams::zeros(params.num_visible(), params.num_hidden());
    add_phase(params, batch, -1.0, g);
    advance_chains(params, chains, k, rng);
    add_phase(params, chains, +1.0, g);
    return g;
}

std::vector<Bitstring> sample_from(std::span<const double> probs, std::size_t count, Rng &rng) {
    std::vector<double> cdf(probs.size());
    std::partial_sum(probs.begin(), probs.end(), cdf.begin());
    const double total = cdf.empty() ? 0.0 : cdf.back();
    if (!(total > 0.0)) {
        throw EmptyError("cannot sample from an all-zero distribution");
    }
    std::vector<Bitstring> out(count);
    for (auto &x : out) {
        const double u = uniform01(rng) * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        auto idx = static_cast<std::size_t>(it - cdf.begin());
        if (idx >= probs.size()) {
            // u rounded up to the total; take the last supported entry.
            idx = probs.size() - 1;
            while (probs[idx] == 0.0) {
                --idx;
            }
        }
        x = static_cast<Bitstring>(idx);
    }
    return out;
}

RbmParams train_pcd(const TrainingData &data, const TrainConfig &cfg, std::size_t n_visible,
                    std::size_t n_hidden, const EpochObserver &observer, std::size_t observe_every) {
    cfg.validate();
    if (n_visible == 0 || n_hidden == 0 || n_visible > 31) {
        throw ConfigError("RBM layer sizes out of range");
    }
    Rng rng(cfg.seed);
    std::normal_distribution<double> init(0.0, cfg.init_weight_std);

    RbmParams params = RbmParams::zeros(n_visible, n_hidden);
    for (Eigen::Index i = 0; i < params.weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < params.weights.cols(); ++j) {
            params.weights(i, j) = cfg.init_weight_std > 0.0 ? init(rng) : 0.0;
        }
    }

    const auto nv = static_cast<Eigen::Index>(n_visible);
    StateMatrix chains(static_cast<Eigen::Index>(cfg.n_chains), nv);
    for (Eigen::Index r = 0; r < chains.rows(); ++r) {
        for (Eigen::Index c = 0; c < nv; ++c) {
            chains(r, c) = uniform01(rng) < 0.5 ? 1.0 : 0.0;
        }
    }

    auto notify = [&](std::size_t epoch) {
        if (observer && observe_every > 0 && (epoch % observe_every == 0 || epoch == cfg.epochs)) {
            observer(epoch, params);
        }
    };

    if (const auto *exact = std::get_if<ExactData>(&data)) {
        if (exact->probs.size() != (std::size_t{1} << n_visible)) {
            throw SizeError("exact data distribution length is not 2^n_visible");
        }
        std::vector<Bitstring> support;
        std::vector<double> mass;
        for (std::size_t x = 0; x < exact->probs.size(); ++x) {
            if (exact->probs[x] > 0.0) {
                support.push_back(static_cast<Bitstring>(x));
                mass.push_back(exact->probs[x]);
            }
        }
        if (support.empty()) {
            throw EmptyError("exact data distribution has no support");
        }
        const StateMatrix states = states_from_bitstrings(support, n_visible);
        const Eigen::Map<const Eigen::VectorXd> p(mass.data(), static_cast<Eigen::Index>(mass.size()));
        for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
            for (std::size_t u = 0; u < std::max<std::size_t>(1, exact->updates_per_epoch); ++u) {
                Gradient g = RbmParams::zeros(n_visible, n_hidden);
                const Eigen::MatrixXd hm = hidden_means(params, states);
                g.vbias -= states.transpose() * p;
                g.hbias -= hm.transpose() * p;
                g.weights.noalias() -= states.transpose() * p.asDiagonal() * hm;
                advance_chains(params, chains, cfg.k_gibbs, rng);
                add_phase(params, chains, +1.0, g);
                params.vbias += cfg.learning_rate * g.vbias;
                params.hbias += cfg.learning_rate * g.hbias;
                params.weights += cfg.learning_rate * g.weights;
            }
            notify(epoch);
        }
    } else {
        const auto &samples = std::get<SampleData>(data).samples;
        if (samples.empty()) {
            throw EmptyError("no training samples");
        }
        const StateMatrix all = states_from_bitstrings(samples, n_visible);
        std::vector<Eigen::Index> order(samples.size());
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        StateMatrix batch;
        for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
            std::shuffle(order.begin(), order.end(), rng);
            for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
                const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
                batch.resize(static_cast<Eigen::Index>(stop - start), nv);
                for (std::size_t r = start; r < stop; ++r) {
                    batch.row(static_cast<Eigen::Index>(r - start)) = all.row(order[r]);
                }
                const Gradient g = pcd_gradient(params, batch, chains, cfg.k_gibbs, rng);
                params.vbias += cfg.learning_rate * g.vbias;
                params.hbias += cfg.learning_rate * g.hbias;
                params.weights += cfg.learning_rate * g.weights;
            }
            notify(epoch);
        }
    }
    if (!params.all_finite()) {
        throw NumericalError("RBM parameters diverged");
    }
    return params;
}

} // namespace qbench::rbm
