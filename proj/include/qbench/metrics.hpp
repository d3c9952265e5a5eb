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

#include <cstdint>
#include <span>
#include <vector>

#include "qbench/frontier.hpp"

namespace qbench::metrics {

inline constexpr double kDefaultEpsilon = 1e-8;

/// D_KL(p || q) with q clipped from below at eps; terms with p(x) = 0 vanish.
[[nodiscard]] double kl_divergence(std::span<const double> p, std::span<const double> q,
                                   double eps = kDefaultEpsilon);

/// KL from the target to the uniform distribution over all 2^n outcomes.
[[nodiscard]] double uniform_baseline(const frontier::TargetDistribution &target,
                                      double eps = kDefaultEpsilon);

/// Median; even-length inputs average the two central order statistics.
[[nodiscard]] double median(std::vector<double> values);

/// Nearest-rank percentile (q in (0, 100]) of an ascending-sorted list.
[[nodiscard]] double percentile_nearest_rank(std::span<const double> sorted, double q);

struct BootstrapSummary {
    double median = 0.0;
    double p5 = 0.0;
    double p95 = 0.0;
    std::size_t resamples = 0;
};

/// Bootstrap distribution of the median: reports the median of the resampled
/// medians and their nearest-rank 5th/95th percentiles.
[[nodiscard]] BootstrapSummary bootstrap_median(std::span<const double> values, std::size_t resamples,
                                                std::uint64_t seed);

} // namespace qbench::metrics
