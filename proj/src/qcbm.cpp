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
#include "qbench/qcbm.hpp"

#include <numbers>
#include <string>

#include "qbench/errors.hpp"

namespace qbench::qcbm {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr std::size_t kMaxQubits = 26;

} // namespace

std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
    if (!(i < j && j < n)) {
        throw IndexError("pair index requires i < j < n");
    }
    // Pairs preceding row i: (n-1) + (n-2) + ... + (n-i).
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

CircuitParams CircuitParams::zeros(std::size_t n) {
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
            std::vector<double>(pair_count(n), 0.0)};
}

CircuitParams CircuitParams::from_flat(std::span<const double> flat, std::size_t n) {
    if (flat.size() != param_count(n)) {
        throw SizeError("expected " + std::to_string(param_count(n)) + " circuit parameters, got " +
                        std::to_string(flat.size()));
    }
    CircuitParams p;
    p.x_angles.assign(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(n));
    p.z_angles.assign(flat.begin() + static_cast<std::ptrdiff_t>(n),
                      flat.begin() + static_cast<std::ptrdiff_t>(2 * n));
    p.xx_angles.assign(flat.begin() + static_cast<std::ptrdiff_t>(2 * n), flat.end());
    return p;
}

std::vector<double> CircuitParams::flat() const {
    std::vector<double> out;
    out.reserve(x_angles.size() + z_angles.size() + xx_angles.size());
    out.insert(out.end(), x_angles.begin(), x_angles.end());
    out.insert(out.end(), z_angles.begin(), z_angles.end());
    out.insert(out.end(), xx_angles.begin(), xx_angles.end());
    return out;
}

StateVector::StateVector(std::size_t num_qubits)
    : num_qubits_(num_qubits) {
    if (num_qubits == 0 || num_qubits > kMaxQubits) {
        throw SizeError("qubit count out of range");
    }
    amps_.assign(std::size_t{1} << num_qubits, Complex{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector::StateVector(std::size_t num_qubits, std::vector<Complex> amplitudes)
    : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    if (num_qubits == 0 || num_qubits > kMaxQubits || amps_.size() != (std::size_t{1} << num_qubits)) {
        throw SizeError("amplitude count is not 2^n");
    }
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const auto &a : amps_) {
        s += std::norm(a);
    }
    return s;
}

void StateVector::check_qubit(std::size_t qubit) const {
    if (qubit >= num_qubits_) {
        throw IndexError("qubit " + std::to_string(qubit) + " out of range for " +
                         std::to_string(num_qubits_) + " qubits");
    }
}

void StateVector::apply_rx(std::size_t qubit, double theta) {
    check_qubit(qubit);
    const double c = std::cos(theta * kHalfPi);
    const Complex mis{0.0, -std::sin(theta * kHalfPi)};
    const std::size_t s = stride(qubit);
    const std::size_t dim = amps_.size();
    for (std::size_t base = 0; base < dim; base += 2 * s) {
        for (std::size_t k = base; k < base + s; ++k) {
            const Complex a0 = amps_[k];
            const Complex a1 = amps_[k + s];
            amps_[k] = c * a0 + mis * a1;
            amps_[k + s] = mis * a0 + c * a1;
        }
    }
}

void StateVector::apply_rz(std::size_t qubit, double theta) {
    check_qubit(qubit);
    const Complex phase0 = std::polar(1.0, -theta * kHalfPi);
    const Complex phase1 = std::polar(1.0, theta * kHalfPi);
    const std::size_t s = stride(qubit);
    const std::size_t dim = amps_.size();
    for (std::size_t base = 0; base < dim; base += 2 * s) {
        for (std::size_t k = base; k < base + s; ++k) {
            amps_[k] *= phase0;
            amps_[k + s] *= phase1;
        }
    }
}

void StateVector::apply_xx(std::size_t i, std::size_t j, double chi) {
    check_qubit(i);
    check_qubit(j);
    if (i == j) {
        throw IndexError("XX gate needs two distinct qubits");
    }
    const double c = std::cos(chi * kHalfPi);
    const Complex mis{0.0, -std::sin(chi * kHalfPi)};
    const std::size_t flip = stride(i) | stride(j);
    const std::size_t high = std::max(stride(i), stride(j));
    const std::size_t dim = amps_.size();
    // Each orbit {x, x ^ flip} is visited once, from the member with the higher bit clear.
    for (std::size_t x = 0; x < dim; ++x) {
        if ((x & high) != 0) {
            continue;
        }
        const std::size_t y = x ^ flip;
        const Complex ax = amps_[x];
        const Complex ay = amps_[y];
        amps_[x] = c * ax + mis * ay;
        amps_[y] = mis * ax + c * ay;
    }
}

void StateVector::apply_xx_layer(std::span<const double> chi) {
    const std::size_t n = num_qubits_;
    if (chi.size() != pair_count(n)) {
        throw SizeError("XX layer needs " + std::to_string(pair_count(n)) + " angles");
    }
    const std::size_t dim = amps_.size();
    auto walsh_hadamard = [&] {
        for (std::size_t h = 1; h < dim; h <<= 1U) {
            for (std::size_t base = 0; base < dim; base += 2 * h) {
                for (std::size_t k = base; k < base + h; ++k) {
                    const Complex a = amps_[k];
                    const Complex b = amps_[k + h];
                    amps_[k] = a + b;
                    amps_[k + h] = a - b;
                }
            }
        }
    };
    walsh_hadamard();
    // In the X basis bit value 0 is the +1 eigenvalue of sigma^x. The phase
    // sum over pairs splits into pairs inside the high qubits, pairs inside the
    // low qubits, and a cross term; the first two are tabulated per half.
    const std::size_t n_hi = n / 2;
    const std::size_t n_lo = n - n_hi;
    auto spin = [](std::size_t bits, std::size_t q, std::size_t width) {
        return ((bits >> (width - 1 - q)) & 1U) != 0U ? -1.0 : 1.0;
    };
    auto within = [&](std::size_t offset, std::size_t width) {
        std::vector<double> table(std::size_t{1} << width, 0.0);
        for (std::size_t b = 0; b < table.size(); ++b) {
            for (std::size_t i = 0; i < width; ++i) {
                for (std::size_t j = i + 1; j < width; ++j) {
                    table[b] += chi[pair_index(offset + i, offset + j, n)] * spin(b, i, width) * spin(b, j, width);
                }
            }
        }
        return table;
    };
    const std::vector<double> hi_phase = within(0, n_hi);
    const std::vector<double> lo_phase = within(n_hi, n_lo);
    // cross[a * n_lo + j] = sum over high qubits i of chi_ij s_i(a)
    std::vector<double> cross((std::size_t{1} << n_hi) * n_lo, 0.0);
    for (std::size_t a = 0; a < (std::size_t{1} << n_hi); ++a) {
        for (std::size_t j = 0; j < n_lo; ++j) {
            for (std::size_t i = 0; i < n_hi; ++i) {
                cross[a * n_lo + j] += chi[pair_index(i, n_hi + j, n)] * spin(a, i, n_hi);
            }
        }
    }
    std::vector<double> lo_spins((std::size_t{1} << n_lo) * n_lo);
    for (std::size_t b = 0; b < (std::size_t{1} << n_lo); ++b) {
        for (std::size_t j = 0; j < n_lo; ++j) {
            lo_spins[b * n_lo + j] = spin(b, j, n_lo);
        }
    }
    const double scale = 1.0 / static_cast<double>(dim);
    for (std::size_t a = 0; a < (std::size_t{1} << n_hi); ++a) {
        const double *u = &cross[a * n_lo];
        for (std::size_t b = 0; b < (std::size_t{1} << n_lo); ++b) {
            const double *sb = &lo_spins[b * n_lo];
            double phase = hi_phase[a] + lo_phase[b];
            for (std::size_t j = 0; j < n_lo; ++j) {
                phase += u[j] * sb[j];
            }
            amps_[(a << n_lo) | b] *= std::polar(scale, -phase * kHalfPi);
        }
    }
    walsh_hadamard();
}

StateVector apply_rx(StateVector sv, std::size_t qubit, double theta) {
    sv.apply_rx(qubit, theta);
    return sv;
}

StateVector apply_rz(StateVector sv, std::size_t qubit, double theta) {
    sv.apply_rz(qubit, theta);
    return sv;
}

StateVector apply_xx(StateVector sv, std::size_t i, std::size_t j, double chi) {
    sv.apply_xx(i, j, chi);
    return sv;
}

namespace {

void check_params(const CircuitParams &params, std::size_t n) {
    if (params.x_angles.size() != n || params.z_angles.size() != n ||
        params.xx_angles.size() != pair_count(n)) {
        throw SizeError("circuit parameters do not match " + std::to_string(n) + " qubits");
    }
}

} // namespace

StateVector run_ansatz(const CircuitParams &params, std::size_t n) {
    check_params(params, n);
    if (n == 0 || n > kMaxQubits) {
        throw SizeError("qubit count out of range");
    }
    // Z(φ) X(θ) |0> = (cos(θπ/2) e^{-iφπ/2}, -i sin(θπ/2) e^{iφπ/2})
    std::vector<Complex> amps{Complex{1.0, 0.0}};
    amps.reserve(std::size_t{1} << n);
    for (std::size_t q = 0; q < n; ++q) {
        const double half_x = params.x_angles[q] * kHalfPi;
        const double half_z = params.z_angles[q] * kHalfPi;
        const Complex a0 = std::cos(half_x) * std::polar(1.0, -half_z);
        const Complex a1 = Complex{0.0, -std::sin(half_x)} * std::polar(1.0, half_z);
        const std::size_t size = amps.size();
        amps.resize(2 * size);
        for (std::size_t k = size; k-- > 0;) {
            const Complex v = amps[k];
            amps[2 * k] = v * a0;
            amps[2 * k + 1] = v * a1;
        }
    }
    StateVector sv(n, std::move(amps));
    if (n > 1) {
        sv.apply_xx_layer(params.xx_angles);
    }
    return sv;
}

StateVector run_ansatz_gatewise(const CircuitParams &params, std::size_t n) {
    check_params(params, n);
    StateVector sv(n);
    for (std::size_t q = 0; q < n; ++q) {
        sv.apply_rx(q, params.x_angles[q]);
        sv.apply_rz(q, params.z_angles[q]);
    }
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            sv.apply_xx(i, j, params.xx_angles[k++]);
        }
    }
    return sv;
}

std::vector<double> born_probs(const StateVector &sv) {
    const auto amps = sv.amplitudes();
    std::vector<double> p(amps.size());
    for (std::size_t x = 0; x < amps.size(); ++x) {
        p[x] = std::norm(amps[x]);
    }
    return p;
}

std::vector<double> model_probs(std::span<const double> flat, std::size_t n) {
    return born_probs(run_ansatz(CircuitParams::from_flat(flat, n), n));
}

} // namespace qbench::qcbm
