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

/// Exact statevector simulation of the two-layer Born machine ansatz:
/// per-qubit X then Z rotations followed by XX rotations on every qubit pair.
/// Angles are in half turns; a gate with generator G applies exp(-i G θ π/2).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qbench::qcbm {

using Complex = std::complex<double>;

[[nodiscard]] constexpr std::size_t param_count(std::size_t n) noexcept { return n * (n + 3) / 2; }
[[nodiscard]] constexpr std::size_t pair_count(std::size_t n) noexcept { return n * (n - 1) / 2; }

/// Position of pair (i, j), i < j, in the order (0,1),(0,2),...,(0,n-1),(1,2),...
[[nodiscard]] std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n);

struct CircuitParams {
    std::vector<double> x_angles;
    std::vector<double> z_angles;
    std::vector<double> xx_angles;

    [[nodiscard]] static CircuitParams zeros(std::size_t n);
    /// Split a flat vector laid out as (x_angles, z_angles, xx_angles).
    [[nodiscard]] static CircuitParams from_flat(std::span<const double> flat, std::size_t n);
    [[nodiscard]] std::vector<double> flat() const;
    [[nodiscard]] std::size_t num_qubits() const noexcept { return x_angles.size(); }
};

/// 2^n complex amplitudes. Qubit 0 is the most significant bit of the index.
class StateVector {
  public:
    /// |0...0>
    explicit StateVector(std::size_t num_qubits);
    StateVector(std::size_t num_qubits, std::vector<Complex> amplitudes);

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amps_; }
    [[nodiscard]] double norm_squared() const;

    void apply_rx(std::size_t qubit, double theta);
    void apply_rz(std::size_t qubit, double theta);
    void apply_xx(std::size_t i, std::size_t j, double chi);

    /// Applies the XX gate on every pair at once, with angles in pair_index order.
    /// All XX rotations are diagonal in the X basis, so the layer is one phase
    /// multiplication between two Walsh-Hadamard transforms.
    void apply_xx_layer(std::span<const double> chi);

  private:
    [[nodiscard]] std::size_t stride(std::size_t qubit) const noexcept {
        return std::size_t{1} << (num_qubits_ - 1 - qubit);
    }
    void check_qubit(std::size_t qubit) const;

    std::size_t num_qubits_;
    std::vector<Complex> amps_;
};

[[nodiscard]] StateVector apply_rx(StateVector sv, std::size_t qubit, double theta);
[[nodiscard]] StateVector apply_rz(StateVector sv, std::size_t qubit, double theta);
[[nodiscard]] StateVector apply_xx(StateVector sv, std::size_t i, std::size_t j, double chi);

/// Ansatz state from |0...0>. The single-qubit layer is evaluated as a product
/// state and the XX layer with apply_xx_layer.
[[nodiscard]] StateVector run_ansatz(const CircuitParams &params, std::size_t n);

/// Same state, built by applying every gate individually in circuit order.
[[nodiscard]] StateVector run_ansatz_gatewise(const CircuitParams &params, std::size_t n);

[[nodiscard]] std::vector<double> born_probs(const StateVector &sv);

/// born_probs(run_ansatz(...)) for a flat parameter vector.
[[nodiscard]] std::vector<double> model_probs(std::span<const double> flat, std::size_t n);

} // namespace qbench::qcbm
