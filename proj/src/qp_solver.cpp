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
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/SVD>

#include "qbench/errors.hpp"
#include "qbench/frontier.hpp"

namespace qbench::frontier {

namespace {

constexpr double kRegularization = 1e-12;
constexpr double kRankTol = 1e-12;

enum class Status { Free, AtLower, AtUpper };

struct Vertices {
    double min_return = 0.0;
    double max_return = 0.0;
    Eigen::VectorXd argmin;
    Eigen::VectorXd argmax;
};

void validate(const QpProblem &p) {
    const Eigen::Index n = p.mu.size();
    if (n == 0) {
        throw SizeError("empty QP");
    }
    if (p.sigma.rows() != n || p.sigma.cols() != n || p.lower.size() != n || p.upper.size() != n) {
        throw SizeError("QP dimensions disagree");
    }
    if ((p.lower.array() > p.upper.array()).any()) {
        throw RangeError("lower bound exceeds upper bound");
    }
}

// Greedy fractional fill from the lower bounds: the budget LP has a vertex
// solution that tops up assets in return order.
std::optional<Vertices> extreme_portfolios(const QpProblem &p) {
    const Eigen::Index n = p.mu.size();
    const double base = p.lower.sum();
    const double slack = 1.0 - base;
    const double capacity = (p.upper - p.lower).sum();
    const double tol = 1e-12 * std::max(1.0, std::abs(base) + std::abs(capacity));
    if (slack < -tol || slack > capacity + tol) {
        return std::nullopt;
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return p.mu(a) < p.mu(b); });

    auto fill = [&](auto first, auto last) {
        Eigen::VectorXd w = p.lower;
        double remaining = std::max(0.0, slack);
        for (auto it = first; it != last && remaining > 0.0; ++it) {
            const double add = std::min(p.upper(*it) - p.lower(*it), remaining);
            w(*it) += add;
            remaining -= add;
        }
        return w;
    };
    Vertices v;
    v.argmin = fill(order.begin(), order.end());
    v.argmax = fill(order.rbegin(), order.rend());
    v.min_return = p.mu.dot(v.argmin);
    v.max_return = p.mu.dot(v.argmax);
    return v;
}

std::vector<Eigen::Index> free_indices(const std::vector<Status> &status) {
    std::vector<Eigen::Index> f;
    for (std::size_t i = 0; i < status.size(); ++i) {
        if (status[i] == Status::Free) {
            f.push_back(static_cast<Eigen::Index>(i));
        }
    }
    return f;
}

Eigen::MatrixXd columns(const Eigen::MatrixXd &a, const std::vector<Eigen::Index> &cols) {
    Eigen::MatrixXd out(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
        out.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
    }
    return out;
}

Eigen::Index numeric_rank(const Eigen::MatrixXd &m) {
    if (m.cols() == 0 || m.rows() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto &s = svd.singularValues();
    const double cutoff = kRankTol * std::max(1.0, s(0));
    return (s.array() > cutoff).count();
}

} // namespace

QpProblem QpProblem::long_only(Eigen::MatrixXd sigma, Eigen::VectorXd mu, double rho) {
    const Eigen::Index n = mu.size();
    return {std::move(sigma), std::move(mu), rho, Eigen::VectorXd::Zero(n),
            Eigen::VectorXd::Ones(n)};
}

std::optional<std::pair<double, double>> attainable_returns(const QpProblem &p) {
    validate(p);
    auto v = extreme_portfolios(p);
    if (!v) {
        return std::nullopt;
    }
    return std::make_pair(v->min_return, v->max_return);
}

std::optional<FrontierPoint> solve_qp(const QpProblem &p) {
    validate(p);
    const Eigen::Index n = p.mu.size();
    auto vert = extreme_portfolios(p);
    if (!vert) {
        return std::nullopt;
    }
    const double rtol = 1e-13 * (1.0 + p.mu.cwiseAbs().maxCoeff());
    if (p.rho < vert->min_return - rtol || p.rho > vert->max_return + rtol) {
        return std::nullopt;
    }

    // Feasible start on the segment between the two extreme portfolios.
    Eigen::VectorXd w;
    const double span = vert->max_return - vert->min_return;
    if (span <= rtol) {
        w = vert->argmin;
    } else {
        const double alpha = std::clamp((p.rho - vert->min_return) / span, 0.0, 1.0);
        w = (1.0 - alpha) * vert->argmin + alpha * vert->argmax;
    }
    w = w.cwiseMax(p.lower).cwiseMin(p.upper);

    Eigen::MatrixXd a(2, n);
    a.row(0).setOnes();
    a.row(1) = p.mu.transpose();
    const Eigen::Index full_rank = numeric_rank(a);
    const Eigen::MatrixXd hess =
        2.0 * (p.sigma + kRegularization * Eigen::MatrixXd::Identity(n, n));

    // Initial working set: active bounds, added while the equality rows keep
    // full rank on the free variables.
    std::vector<Status> status(static_cast<std::size_t>(n), Status::Free);
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool at_lower = w(i) <= p.lower(i);
        const bool at_upper = w(i) >= p.upper(i);
        if (!at_lower && !at_upper) {
            continue;
        }
        auto &s = status[static_cast<std::size_t>(i)];
        s = at_lower ? Status::AtLower : Status::AtUpper;
        if (numeric_rank(columns(a, free_indices(status))) < full_rank) {
            s = Status::Free;
        }
    }

    const int max_iterations = 100 + 50 * static_cast<int>(n);
    for (int iter = 0; iter < max_iterations; ++iter) {
        const auto free = free_indices(status);
        const Eigen::VectorXd grad = hess * w;
        const Eigen::MatrixXd a_free = columns(a, free);
        const auto nf = static_cast<Eigen::Index>(free.size());

        Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
        if (nf > 0) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(a_free, Eigen::ComputeFullV);
            const Eigen::Index r = numeric_rank(a_free);
            const Eigen::Index dim = nf - r;
            if (dim > 0) {
                const Eigen::MatrixXd z = svd.matrixV().rightCols(dim);
                Eigen::MatrixXd h_free(nf, nf);
                Eigen::VectorXd g_free(nf);
                for (Eigen::Index x = 0; x < nf; ++x) {
                    g_free(x) = grad(free[static_cast<std::size_t>(x)]);
                    for (Eigen::Index y = 0; y < nf; ++y) {
                        h_free(x, y) =
                            hess(free[static_cast<std::size_t>(x)], free[static_cast<std::size_t>(y)]);
                    }
                }
                const Eigen::MatrixXd reduced = z.transpose() * h_free * z;
                Eigen::LDLT<Eigen::MatrixXd> ldlt(reduced);
                if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
                    throw NumericalError("reduced Hessian is not positive definite");
                }
                const Eigen::VectorXd y = ldlt.solve(-(z.transpose() * g_free));
                const Eigen::VectorXd p_free = z * y;
                for (Eigen::Index x = 0; x < nf; ++x) {
                    step(free[static_cast<std::size_t>(x)]) = p_free(x);
                }
            }
        }

        const double step_tol = 1e-14 * (1.0 + w.cwiseAbs().maxCoeff());
        if (step.cwiseAbs().maxCoeff() <= step_tol) {
            // Multipliers from the free rows, then the bound multipliers.
            Eigen::Vector2d lambda = Eigen::Vector2d::Zero();
            if (nf > 0) {
                Eigen::VectorXd g_free(nf);
                for (Eigen::Index x = 0; x < nf; ++x) {
                    g_free(x) = grad(free[static_cast<std::size_t>(x)]);
                }
                lambda = a_free.transpose()
                             .jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                             .solve(g_free);
            } else {
                // Every variable bound: pick the least-squares multipliers over all rows.
                lambda = a.transpose().jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(grad);
            }
            Eigen::VectorXd nu = grad - a.transpose() * lambda;
            const double dual_tol = 1e-11 * (1.0 + grad.cwiseAbs().maxCoeff());

            Eigen::Index worst = -1;
            double worst_violation = dual_tol;
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto s = status[static_cast<std::size_t>(i)];
                if (s == Status::Free || p.lower(i) == p.upper(i)) {
                    continue;
                }
                const double violation = s == Status::AtLower ? -nu(i) : nu(i);
                if (violation > worst_violation) {
                    worst_violation = violation;
                    worst = i;
                }
            }
            if (worst < 0) {
                FrontierPoint out;
                out.weights = w;
                out.rho = p.rho;
                out.risk = std::sqrt(std::max(0.0, w.dot(p.sigma * w)));
                out.eq_multipliers = lambda;
                out.bound_multipliers = Eigen::VectorXd::Zero(n);
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (status[static_cast<std::size_t>(i)] != Status::Free) {
                        out.bound_multipliers(i) = nu(i);
                    }
                }
                out.iterations = iter + 1;
                return out;
            }
            status[static_cast<std::size_t>(worst)] = Status::Free;
            continue;
        }

        // Ratio test against the bounds of the free variables.
        double alpha = 1.0;
        Eigen::Index blocking = -1;
        Status blocking_status = Status::Free;
        for (Eigen::Index i : free) {
            if (step(i) < 0.0) {
                const double t = (p.lower(i) - w(i)) / step(i);
                if (t < alpha) {
                    alpha = std::max(0.0, t);
                    blocking = i;
                    blocking_status = Status::AtLower;
                }
            } else if (step(i) > 0.0) {
                const double t = (p.upper(i) - w(i)) / step(i);
                if (t < alpha) {
                    alpha = std::max(0.0, t);
                    blocking = i;
                    blocking_status = Status::AtUpper;
                }
            }
        }
        w += alpha * step;
        if (blocking >= 0) {
            status[static_cast<std::size_t>(blocking)] = blocking_status;
            w(blocking) = blocking_status == Status::AtLower ? p.lower(blocking) : p.upper(blocking);
        }
        w = w.cwiseMax(p.lower).cwiseMin(p.upper);
    }
    throw NumericalError("active-set iteration limit reached");
}

double kkt_residual(const QpProblem &p, const FrontierPoint &x) {
    const Eigen::VectorXd &w = x.weights;
    const Eigen::Index n = w.size();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    double r = 0.0;
    const Eigen::VectorXd stationarity = 2.0 * p.sigma * w - x.eq_multipliers(0) * ones -
                                         x.eq_multipliers(1) * p.mu - x.bound_multipliers;
    r = std::max(r, stationarity.cwiseAbs().maxCoeff());
    r = std::max(r, std::abs(w.sum() - 1.0));
    r = std::max(r, std::abs(p.mu.dot(w) - p.rho));
    for (Eigen::Index i = 0; i < n; ++i) {
        r = std::max(r, p.lower(i) - w(i));
        r = std::max(r, w(i) - p.upper(i));
        const double nu = x.bound_multipliers(i);
        if (p.lower(i) == p.upper(i)) {
            continue;
        }
        if (nu > 0.0) {
            r = std::max(r, nu * (w(i) - p.lower(i)));
        } else if (nu < 0.0) {
            r = std::max(r, -nu * (p.upper(i) - w(i)));
        }
    }
    return r;
}

} // namespace qbench::frontier
