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

/// Price ingestion, return statistics and seeded synthetic price generation.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qbench::market {

using Date = std::chrono::year_month_day;

[[nodiscard]] Date parse_date(const std::string &text);
[[nodiscard]] std::string format_date(const Date &d);

/**
 * Daily closing prices, one row per date and one column per asset.
 *
 * Construction validates the invariants (strictly increasing dates, strictly
 * positive prices, at least two rows), so every live instance is valid.
 */
class PriceMatrix {
  public:
    PriceMatrix(std::vector<Date> dates, std::vector<std::string> tickers,
                Eigen::MatrixXd prices);

    [[nodiscard]] const std::vector<Date> &dates() const noexcept { return dates_; }
    [[nodiscard]] const std::vector<std::string> &tickers() const noexcept { return tickers_; }
    [[nodiscard]] const Eigen::MatrixXd &prices() const noexcept { return prices_; }
    [[nodiscard]] std::size_t num_days() const noexcept { return dates_.size(); }
    [[nodiscard]] std::size_t num_assets() const noexcept { return tickers_.size(); }

    /// Restriction to the given columns, in the given order.
    [[nodiscard]] PriceMatrix select(const std::vector<std::size_t> &columns) const;

    /// Stable content hash over dates, tickers and the exact price bits.
    [[nodiscard]] std::uint64_t content_hash() const;

    friend bool operator==(const PriceMatrix &a, const PriceMatrix &b) {
        return a.dates_ == b.dates_ && a.tickers_ == b.tickers_ && a.prices_ == b.prices_;
    }

  private:
    std::vector<Date> dates_;
    std::vector<std::string> tickers_;
    Eigen::MatrixXd prices_;
};

struct ReturnStats {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(mu.size()); }
    /// Sub-statistics for the listed assets.
    [[nodiscard]] ReturnStats select(const std::vector<std::size_t> &assets) const;
};

/// Reads the wide CSV layout `date,<T1>,<T2>,...`.
[[nodiscard]] PriceMatrix read_prices(std::istream &in);
[[nodiscard]] PriceMatrix load_prices(const std::filesystem::path &path);

void write_prices(std::ostream &out, const PriceMatrix &pm);
void save_prices(const std::filesystem::path &path, const PriceMatrix &pm);

/// Arithmetic daily returns, (T-1) x N.
[[nodiscard]] Eigen::MatrixXd compute_returns(const PriceMatrix &pm);

/// Column means and unbiased (T-1) sample covariance of a returns matrix.
[[nodiscard]] ReturnStats compute_stats(const Eigen::MatrixXd &returns);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct SynthSpec {
    std::size_t n_assets = 20;
    std::size_t n_days = 45;
    std::uint64_t seed = 7;
    Interval drift{-0.002, 0.006};
    Interval vol{0.005, 0.03};
};

/// Geometric random walk; drift and volatility per asset are drawn uniformly
/// from the configured intervals.
[[nodiscard]] PriceMatrix synth_prices(const SynthSpec &spec);

/// n distinct column indices drawn uniformly without replacement, ascending.
[[nodiscard]] std::vector<std::size_t> select_subset(const PriceMatrix &pm, std::size_t n,
                                                     std::uint64_t seed);

} // namespace qbench::market
