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
#include "qbench/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "qbench/common.hpp"
#include "qbench/errors.hpp"

namespace qbench::market {

namespace {

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

Date parse_date(const std::string &text) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw ValidationError("date '" + text + "' is not YYYY-MM-DD");
    }
    auto ok = [](auto r) { return r.ec == std::errc{}; };
    const char *s = text.data();
    if (!ok(std::from_chars(s, s + 4, y)) || !ok(std::from_chars(s + 5, s + 7, m)) ||
        !ok(std::from_chars(s + 8, s + 10, d))) {
        throw ValidationError("date '" + text + "' is not YYYY-MM-DD");
    }
    Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) {
        throw ValidationError("date '" + text + "' is not a calendar date");
    }
    return date;
}

std::string format_date(const Date &d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

PriceMatrix::PriceMatrix(std::vector<Date> dates, std::vector<std::string> tickers,
                         Eigen::MatrixXd prices)
    : dates_(std::move(dates)), tickers_(std::move(tickers)), prices_(std::move(prices)) {
    if (static_cast<std::size_t>(prices_.rows()) != dates_.size() ||
        static_cast<std::size_t>(prices_.cols()) != tickers_.size()) {
        throw ValidationError("price matrix shape does not match dates x tickers");
    }
    if (dates_.size() < 2) {
        throw ValidationError("need at least 2 dates to form a return");
    }
    if (tickers_.empty()) {
        throw ValidationError("no assets");
    }
    if (std::set<std::string>(tickers_.begin(), tickers_.end()).size() != tickers_.size()) {
        throw ValidationError("duplicate ticker names");
    }
    for (std::size_t t = 1; t < dates_.size(); ++t) {
        if (!(dates_[t - 1] < dates_[t])) {
            throw ValidationError("dates not strictly increasing at row " + std::to_string(t + 1) +
                                  " (" + format_date(dates_[t]) + ")");
        }
    }
    for (Eigen::Index t = 0; t < prices_.rows(); ++t) {
        for (Eigen::Index i = 0; i < prices_.cols(); ++i) {
            const double p = prices_(t, i);
            if (!(p > 0.0) || !std::isfinite(p)) {
                throw ValidationError("non-positive or non-finite price at row " +
                                      std::to_string(t + 1) + ", ticker " +
                                      tickers_[static_cast<std::size_t>(i)]);
            }
        }
    }
}

PriceMatrix PriceMatrix::select(const std::vector<std::size_t> &columns) const {
    Eigen::MatrixXd sub(prices_.rows(), static_cast<Eigen::Index>(columns.size()));
    std::vector<std::string> names;
    names.reserve(columns.size());
    for (std::size_t k = 0; k < columns.size(); ++k) {
        if (columns[k] >= tickers_.size()) {
            throw RangeError("column index out of range");
        }
        sub.col(static_cast<Eigen::Index>(k)) = prices_.col(static_cast<Eigen::Index>(columns[k]));
        names.push_back(tickers_[columns[k]]);
    }
    return {dates_, std::move(names), std::move(sub)};
}

std::uint64_t PriceMatrix::content_hash() const {
    Fnv1a h;
    for (const auto &d : dates_) {
        h.update(format_date(d));
    }
    for (const auto &t : tickers_) {
        h.update(t);
        h.update(",");
    }
    for (Eigen::Index t = 0; t < prices_.rows(); ++t) {
        for (Eigen::Index i = 0; i < prices_.cols(); ++i) {
            h.update_double(prices_(t, i));
        }
    }
    return h.digest();
}

ReturnStats ReturnStats::select(const std::vector<std::size_t> &assets) const {
    const auto k = static_cast<Eigen::Index>(assets.size());
    ReturnStats out{Eigen::VectorXd(k), Eigen::MatrixXd(k, k)};
    for (Eigen::Index a = 0; a < k; ++a) {
        const auto ia = static_cast<Eigen::Index>(assets[static_cast<std::size_t>(a)]);
        if (ia >= mu.size()) {
            throw RangeError("asset index out of range");
        }
        out.mu(a) = mu(ia);
        for (Eigen::Index b = 0; b < k; ++b) {
            out.sigma(a, b) = sigma(ia, static_cast<Eigen::Index>(assets[static_cast<std::size_t>(b)]));
        }
    }
    return out;
}

PriceMatrix read_prices(std::istream &in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw ParseError("empty price file", 1, 1);
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    // UTF-8 byte order mark
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) {
        line.erase(0, 3);
    }
    auto header = split_csv_line(line);
    if (header.size() < 2 || header.front() != "date") {
        throw ParseError("header must be 'date,<ticker>,...'", 1, 1);
    }
    std::vector<std::string> tickers(header.begin() + 1, header.end());
    for (std::size_t i = 0; i < tickers.size(); ++i) {
        if (tickers[i].empty()) {
            throw ParseError("empty ticker name", 1, i + 2);
        }
    }

    std::vector<Date> dates;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> rejected;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " cells, found " +
                                 std::to_string(cells.size()),
                             line_no, std::min(cells.size(), header.size()) + 1);
        }
        Date date;
        try {
            date = parse_date(cells[0]);
        } catch (const ValidationError &e) {
            throw ParseError(e.what(), line_no, 1);
        }
        const std::size_t row_no = rows.size() + 1;
        std::vector<double> row(tickers.size(), 0.0);
        std::string problem;
        for (std::size_t i = 0; i < tickers.size(); ++i) {
            const std::string &cell = cells[i + 1];
            if (cell.empty()) {
                problem = "missing price for " + tickers[i];
                continue;
            }
            double v = 0.0;
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() ||
                !std::isfinite(v)) {
                throw ParseError("malformed price '" + cell + "'", line_no, i + 2);
            }
            if (!(v > 0.0)) {
                problem = "non-positive price for " + tickers[i];
            }
            row[i] = v;
        }
        if (!problem.empty()) {
            rejected.push_back("row " + std::to_string(row_no) + " (line " +
                               std::to_string(line_no) + "): " + problem);
        }
        dates.push_back(date);
        rows.push_back(std::move(row));
    }
    if (!rejected.empty()) {
        std::string msg = "rejected rows:";
        for (const auto &r : rejected) {
            msg += "\n  " + r;
        }
        throw ValidationError(msg);
    }

    Eigen::MatrixXd prices(static_cast<Eigen::Index>(rows.size()),
                           static_cast<Eigen::Index>(tickers.size()));
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t i = 0; i < tickers.size(); ++i) {
            prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = rows[t][i];
        }
    }
    return {std::move(dates), std::move(tickers), std::move(prices)};
}

PriceMatrix load_prices(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open price file " + path.string());
    }
    return read_prices(in);
}

void write_prices(std::ostream &out, const PriceMatrix &pm) {
    out << "date";
    for (const auto &t : pm.tickers()) {
        out << ',' << t;
    }
    out << '\n';
    const auto &p = pm.prices();
    for (std::size_t t = 0; t < pm.num_days(); ++t) {
        out << format_date(pm.dates()[t]);
        for (Eigen::Index i = 0; i < p.cols(); ++i) {
            out << ',' << format_double(p(static_cast<Eigen::Index>(t), i));
        }
        out << '\n';
    }
}

void save_prices(const std::filesystem::path &path, const PriceMatrix &pm) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write price file " + path.string());
    }
    write_prices(out, pm);
}

Eigen::MatrixXd compute_returns(const PriceMatrix &pm) {
    const auto &p = pm.prices();
    const Eigen::Index rows = p.rows() - 1;
    Eigen::MatrixXd r(rows, p.cols());
    for (Eigen::Index t = 0; t < rows; ++t) {
        for (Eigen::Index i = 0; i < p.cols(); ++i) {
            r(t, i) = (p(t + 1, i) - p(t, i)) / p(t, i);
        }
    }
    return r;
}

ReturnStats compute_stats(const Eigen::MatrixXd &returns) {
    const Eigen::Index t = returns.rows();
    const Eigen::Index n = returns.cols();
    if (t < 2) {
        throw DegenerateError("need at least 2 return rows for a sample covariance");
    }
    ReturnStats s{returns.colwise().mean().transpose(), Eigen::MatrixXd(n, n)};
    const Eigen::MatrixXd centered = returns.rowwise() - s.mu.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double c = centered.col(i).dot(centered.col(j)) / static_cast<double>(t - 1);
            s.sigma(i, j) = c;
            s.sigma(j, i) = c;
        }
    }
    return s;
}

PriceMatrix synth_prices(const SynthSpec &spec) {
    if (spec.n_days < 2) {
        throw RangeError("synthetic series needs at least 2 days");
    }
    if (spec.n_assets == 0) {
        throw RangeError("synthetic series needs at least 1 asset");
    }
    if (spec.drift.lo > spec.drift.hi || spec.vol.lo > spec.vol.hi || spec.vol.lo < 0.0) {
        throw RangeError("empty or negative drift/volatility range");
    }
    std::mt19937_64 rng(spec.seed);
    auto uniform = [&rng](const Interval &iv) {
        // Affine map of a canonical draw so degenerate intervals return lo exactly.
        const double u = std::generate_canonical<double, 53>(rng);
        return iv.lo + (iv.hi - iv.lo) * u;
    };
    std::normal_distribution<double> normal(0.0, 1.0);

    const auto n = static_cast<Eigen::Index>(spec.n_assets);
    const auto days = static_cast<Eigen::Index>(spec.n_days);
    std::vector<std::string> tickers;
    Eigen::VectorXd drift(n);
    Eigen::VectorXd vol(n);
    Eigen::MatrixXd prices(days, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "SYN%03td", i);
        tickers.emplace_back(name);
        drift(i) = uniform(spec.drift);
        vol(i) = uniform(spec.vol);
        prices(0, i) = 20.0 + 180.0 * std::generate_canonical<double, 53>(rng);
    }
    for (Eigen::Index t = 1; t < days; ++t) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double z = normal(rng);
            const double step = drift(i) - 0.5 * vol(i) * vol(i) + vol(i) * z;
            prices(t, i) = prices(t - 1, i) * std::exp(step);
        }
    }

    // Business days from 2017-12-01.
    std::vector<Date> dates;
    std::chrono::sys_days day{Date{std::chrono::year{2017}, std::chrono::December, std::chrono::day{1}}};
    while (dates.size() < spec.n_days) {
        const std::chrono::weekday wd{day};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) {
            dates.emplace_back(day);
        }
        day += std::chrono::days{1};
    }
    return {std::move(dates), std::move(tickers), std::move(prices)};
}

std::vector<std::size_t> select_subset(const PriceMatrix &pm, std::size_t n, std::uint64_t seed) {
    const std::size_t total = pm.num_assets();
    if (n > total) {
        throw RangeError("requested " + std::to_string(n) + " assets but only " +
                         std::to_string(total) + " available");
    }
    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < n; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, total - 1);
        std::swap(idx[k], idx[pick(rng)]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    return idx;
}

} // namespace qbench::market
