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
#include "qbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "qbench/errors.hpp"

namespace qbench::metrics {

double kl_divergence(std::span<const double> p, std::span<const double> q, double eps) {
    if (p.size() != q.size()) {
        throw SizeError("KL arguments differ in length");
    }
    if (!(eps > 0.0)) {
        throw RangeError("clip epsilon must be positive");
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) {
        throw ValidationError("reference distribution does not sum to 1");
    }
    double d = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) {
        if (p[x] > 0.0) {
            d += p[x] * (std::log(p[x]) - std::log(std::max(eps, q[x])));
        }
    }
    return d;
}

double uniform_baseline(const frontier::TargetDistribution &target, double eps) {
    const std::vector<double> uniform(target.probs.size(), 1.0 / static_cast<double>(target.probs.size()));
    return kl_divergence(target.probs, uniform, eps);
}

double median(std::vector<double> values) {
    if (values.empty()) {
        throw EmptyError("median of an empty list");
    }
    const std::size_t n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (n % 2 == 1) {
        return *mid;
    }
    const double upper = *mid;
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

double percentile_nearest_rank(std::span<const double> sorted, double q) {
    if (sorted.empty()) {
        throw EmptyError("percentile of an empty list");
    }
    if (!(q > 0.0 && q <= 100.0)) {
        throw RangeError("percentile must lie in (0, 100]");
    }
    const auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(sorted.size())));
    return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

BootstrapSummary bootstrap_median(std::span<const double> values, std::size_t resamples,
                                  std::uint64_t seed) {
    if (values.empty()) {
        throw EmptyError("bootstrap of an empty list");
    }
    if (resamples == 0) {
        throw RangeError("bootstrap needs at least one resample");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    std::vector<double> medians(resamples);
    std::vector<double> draw(values.size());
    for (auto &m : medians) {
        for (auto &d : draw) {
            d = values[pick(rng)];
        }
        m = median(draw);
    }
    std::sort(medians.begin(), medians.end());
    BootstrapSummary s;
    s.median = median(medians);
    s.p5 = percentile_nearest_rank(medians, 5.0);
    s.p95 = percentile_nearest_rank(medians, 95.0);
    s.resamples = resamples;
    return s;
}

} // namespace qbench::metrics
