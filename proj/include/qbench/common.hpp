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

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

namespace qbench {

// Bitstrings are stored as integers. Position 0 (asset 1, qubit 0, visible
// unit 0) is the leftmost printed character and the most significant bit.

using Bitstring = std::uint32_t;

[[nodiscard]] constexpr bool bit_at(Bitstring x, std::size_t pos, std::size_t n) noexcept {
    return ((x >> (n - 1 - pos)) & 1U) != 0U;
}

[[nodiscard]] constexpr Bitstring bit_mask(std::size_t pos, std::size_t n) noexcept {
    return Bitstring{1} << (n - 1 - pos);
}

[[nodiscard]] constexpr int popcount(Bitstring x) noexcept { return std::popcount(x); }

[[nodiscard]] inline std::string to_bitstring(Bitstring x, std::size_t n) {
    std::string s(n, '0');
    for (std::size_t i = 0; i < n; ++i) {
        if (bit_at(x, i, n)) {
            s[i] = '1';
        }
    }
    return s;
}

[[nodiscard]] inline Bitstring from_bitstring(std::string_view s) {
    Bitstring x = 0;
    for (char c : s) {
        x = (x << 1U) | (c == '1' ? 1U : 0U);
    }
    return x;
}

/// 64-bit FNV-1a.
class Fnv1a {
  public:
    void update(std::string_view bytes) noexcept {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 1099511628211ULL;
        }
    }
    void update_u64(std::uint64_t v) noexcept {
        for (int i = 0; i < 8; ++i) {
            state_ ^= (v >> (8 * i)) & 0xffU;
            state_ *= 1099511628211ULL;
        }
    }
    void update_double(double d) noexcept { update_u64(std::bit_cast<std::uint64_t>(d)); }
    [[nodiscard]] std::uint64_t digest() const noexcept { return state_; }

  private:
    std::uint64_t state_ = 1469598103934665603ULL;
};

/// SplitMix64 finalizer; used to derive independent stream seeds.
[[nodiscard]] constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                                  std::uint64_t b = 0) noexcept {
    return mix_seed(mix_seed(mix_seed(base) ^ a) ^ b);
}

[[nodiscard]] inline std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xfU];
        v >>= 4U;
    }
    return out;
}

} // namespace qbench
