// Copyright 2026 The ddkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace ddkit {

using BigInt = boost::multiprecision::cpp_int;

/// Non-negative Paley index n = sum_j b_j 2^(j-1). Bits are 1-indexed: bit(1) is
/// the least significant digit and selects the slowest Rademacher factor R_1.
class PaleyOrder {
   public:
    PaleyOrder() = default;
    PaleyOrder(std::uint64_t n);  // NOLINT: implicit from small literals is convenient
    explicit PaleyOrder(BigInt n);

    /// Parses a decimal literal. Throws std::invalid_argument on anything else.
    static PaleyOrder parse(std::string_view decimal);

    const BigInt &value() const {
        return value_;
    }
    bool is_zero() const {
        return value_.is_zero();
    }
    bool bit(std::size_t j) const;
    /// Number of binary digits m (0 for n = 0).
    std::size_t bit_length() const;
    std::size_t hamming_weight() const;
    /// 1-indexed positions of the nonzero digits, ascending.
    std::vector<std::size_t> set_bits() const;
    std::string str() const;

    bool operator==(const PaleyOrder &other) const {
        return value_ == other.value_;
    }
    bool operator<(const PaleyOrder &other) const {
        return value_ < other.value_;
    }

   private:
    BigInt value_{0};
};

/// Exact rational num/den with den > 0, kept in lowest terms.
struct Fraction {
    std::int64_t num = 0;
    std::uint64_t den = 1;

    Fraction() = default;
    Fraction(std::int64_t n, std::uint64_t d);

    double to_double() const {
        return static_cast<double>(num) / static_cast<double>(den);
    }
    bool operator==(const Fraction &) const = default;
};

/// Midpoint of slot k on a grid of n_slots equal slots over [0, 1).
Fraction slot_midpoint(std::uint64_t k, std::uint64_t n_slots);

/// Triple of Paley orders (n_x, n_y, n_z) describing a three-axis Walsh sequence.
struct PaleyVector {
    std::array<PaleyOrder, 3> n;

    const PaleyOrder &x() const {
        return n[0];
    }
    const PaleyOrder &y() const {
        return n[1];
    }
    const PaleyOrder &z() const {
        return n[2];
    }
    std::size_t bit_length() const;
    std::string str() const;  // "[nx,ny,nz]"

    bool operator==(const PaleyVector &) const = default;
};

/// Per-slot +-1 values of the x, y, z switching functions.
struct SwitchingFunctions {
    std::uint64_t n_slots = 0;
    std::array<std::vector<int>, 3> axis;

    const std::vector<int> &x() const {
        return axis[0];
    }
    const std::vector<int> &y() const {
        return axis[1];
    }
    const std::vector<int> &z() const {
        return axis[2];
    }
    bool operator==(const SwitchingFunctions &) const = default;
};

/// sgn(sin(2^j pi x)) for x in [0, 1). Throws std::domain_error when 2^j x is an
/// integer (the sign is undefined there) and std::invalid_argument when j == 0
/// or x lies outside [0, 1).
int rademacher(unsigned j, Fraction x);

/// Paley-ordered Walsh function: the product of R_j(x) over the set bits of n.
int walsh_paley(const PaleyOrder &n, Fraction x);

/// Slot k of axis u carries -W_{n_u}((k + 1/2) / n_slots).
/// Throws std::invalid_argument if n_slots is not a power of two or is too
/// coarse to resolve the highest set bit of v.
SwitchingFunctions switching_functions(const PaleyVector &v, std::uint64_t n_slots);

/// (1 / 2^m) sum over the 2^m slot midpoints of W_n W_k. Requires n, k < 2^m.
Fraction walsh_inner_product(const PaleyOrder &n, const PaleyOrder &k, unsigned m);

bool is_power_of_two(std::uint64_t n);

}  // namespace ddkit
