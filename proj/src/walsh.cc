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

#include "ddkit/walsh.h"

#include <bit>
#include <numeric>
#include <stdexcept>

namespace ddkit {

PaleyOrder::PaleyOrder(std::uint64_t n) : value_(n) {
}

PaleyOrder::PaleyOrder(BigInt n) : value_(std::move(n)) {
    if (value_ < 0) {
        throw std::invalid_argument("Paley order must be non-negative");
    }
}

PaleyOrder PaleyOrder::parse(std::string_view decimal) {
    if (decimal.empty()) {
        throw std::invalid_argument("empty Paley order");
    }
    BigInt v = 0;
    for (char c : decimal) {
        if (c < '0' || c > '9') {
            throw std::invalid_argument("Paley order '" + std::string(decimal) + "' is not a non-negative integer");
        }
        v = v * 10 + (c - '0');
    }
    return PaleyOrder(std::move(v));
}

bool PaleyOrder::bit(std::size_t j) const {
    if (j == 0) {
        throw std::invalid_argument("bit positions are 1-indexed");
    }
    return boost::multiprecision::bit_test(value_, static_cast<unsigned>(j - 1));
}

std::size_t PaleyOrder::bit_length() const {
    if (value_.is_zero()) {
        return 0;
    }
    return static_cast<std::size_t>(boost::multiprecision::msb(value_)) + 1;
}

std::size_t PaleyOrder::hamming_weight() const {
    return set_bits().size();
}

std::vector<std::size_t> PaleyOrder::set_bits() const {
    std::vector<std::size_t> out;
    std::size_t m = bit_length();
    for (std::size_t j = 1; j <= m; j++) {
        if (bit(j)) {
            out.push_back(j);
        }
    }
    return out;
}

std::string PaleyOrder::str() const {
    return value_.str();
}

Fraction::Fraction(std::int64_t n, std::uint64_t d) {
    if (d == 0) {
        throw std::invalid_argument("zero denominator");
    }
    std::uint64_t mag = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
    std::uint64_t g = std::gcd(mag, d);
    if (g == 0) {
        g = 1;
    }
    num = n / static_cast<std::int64_t>(g);
    den = d / g;
}

Fraction slot_midpoint(std::uint64_t k, std::uint64_t n_slots) {
    if (k >= n_slots || n_slots > (std::uint64_t{1} << 62)) {
        throw std::invalid_argument("slot index out of range");
    }
    return Fraction(static_cast<std::int64_t>(2 * k + 1), 2 * n_slots);
}

std::size_t PaleyVector::bit_length() const {
    return std::max({n[0].bit_length(), n[1].bit_length(), n[2].bit_length()});
}

std::string PaleyVector::str() const {
    return "[" + n[0].str() + "," + n[1].str() + "," + n[2].str() + "]";
}

bool is_power_of_two(std::uint64_t n) {
    return std::has_single_bit(n);
}

int rademacher(unsigned j, Fraction x) {
    if (j == 0) {
        throw std::invalid_argument("Rademacher index starts at 1");
    }
    if (x.num < 0 || static_cast<std::uint64_t>(x.num) >= x.den) {
        throw std::invalid_argument("Rademacher argument must lie in [0, 1)");
    }
    // floor(2^j x) mod 2 is the j-th binary digit of x; track 2^j num mod 2 den.
    using u128 = unsigned __int128;
    const u128 den = x.den;
    const u128 mod = 2 * den;
    u128 r = static_cast<u128>(x.num) % mod;
    for (unsigned i = 0; i < j; i++) {
        r = (2 * r) % mod;
    }
    if (r % den == 0) {
        throw std::domain_error("Rademacher R_" + std::to_string(j) + " is undefined at dyadic point " +
                                std::to_string(x.num) + "/" + std::to_string(x.den));
    }
    return r < den ? +1 : -1;
}

int walsh_paley(const PaleyOrder &n, Fraction x) {
    int sign = +1;
    for (std::size_t j : n.set_bits()) {
        sign *= rademacher(static_cast<unsigned>(j), x);
    }
    return sign;
}

SwitchingFunctions switching_functions(const PaleyVector &v, std::uint64_t n_slots) {
    if (!is_power_of_two(n_slots)) {
        throw std::invalid_argument("slot count " + std::to_string(n_slots) + " is not a power of two");
    }
    const auto m = static_cast<std::size_t>(std::countr_zero(n_slots));
    if (m < v.bit_length()) {
        throw std::invalid_argument("slot count " + std::to_string(n_slots) + " cannot resolve Paley vector " +
                                    v.str());
    }
    SwitchingFunctions out;
    out.n_slots = n_slots;
    for (std::size_t u = 0; u < 3; u++) {
        out.axis[u].resize(n_slots);
        for (std::uint64_t k = 0; k < n_slots; k++) {
            out.axis[u][k] = -walsh_paley(v.n[u], slot_midpoint(k, n_slots));
        }
    }
    return out;
}

Fraction walsh_inner_product(const PaleyOrder &n, const PaleyOrder &k, unsigned m) {
    if (m > 40) {
        throw std::invalid_argument("grid too fine for exhaustive inner product");
    }
    if (n.bit_length() > m || k.bit_length() > m) {
        throw std::invalid_argument("Paley orders must be below 2^m");
    }
    const std::uint64_t slots = std::uint64_t{1} << m;
    std::int64_t acc = 0;
    for (std::uint64_t s = 0; s < slots; s++) {
        Fraction x = slot_midpoint(s, slots);
        acc += walsh_paley(n, x) * walsh_paley(k, x);
    }
    return Fraction(acc, slots);
}

}  // namespace ddkit
