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
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ddkit/sequence.h"

namespace ddkit {

/// Operator-norm bounds carried through the concatenation recursion.
/// `duration` is the running time of the sequence built so far.
struct NormState {
    double beta = 0;
    std::array<double, 3> j{};
    double duration = 0;
};

/// One step of the norm recursion for p_axis wrapped around the current
/// sequence. The aligned component and beta are kept; each orthogonal
/// component v picks up duration * (beta * |B_v| + |B_w| * |B_axis|).
/// The duration doubles. Validity (max(beta, J) * duration << 1) is not checked.
NormState renormalize_norms(const NormState &state, Axis axis);
/// As above; p_0 only doubles the duration.
NormState renormalize_norms(const NormState &state, Letter letter);

/// 3 x |s| binary matrix with L(mu, j) = 1 iff the j-th applied projection
/// (innermost first) is along mu. '0' letters give all-zero columns.
struct LMatrix {
    std::array<std::vector<std::uint8_t>, 3> rows;

    std::size_t columns() const {
        return rows[0].size();
    }
    /// j is 1-indexed.
    std::uint8_t at(Axis mu, std::size_t j) const {
        return rows[static_cast<int>(mu)].at(j - 1);
    }
};
LMatrix build_l_matrix(const ProjectionString &s);

/// Leading-order bound |B_mu^s| <= prefactor * (tau0 * scale)^exponent * J.
struct AxisPrefactor {
    BigInt prefactor = 1;
    unsigned log2_prefactor = 0;
    unsigned exponent = 0;

    bool operator==(const AxisPrefactor &) const = default;
};
AxisPrefactor axis_prefactor(const ProjectionString &s, Axis axis);

enum class BoundMode { sum, dominant };
/// weak_coupling: beta >> J. strong_coupling: J >> beta.
enum class Regime { weak_coupling, strong_coupling };

const char *to_string(BoundMode m);
const char *to_string(Regime r);
BoundMode bound_mode_from_string(const std::string &s);

class RegimeError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

struct EpgBound {
    ProjectionString word;
    std::array<AxisPrefactor, 3> per_axis;
    /// Axes whose terms enter `coefficient`.
    std::array<bool, 3> retained{};
    Regime regime = Regime::weak_coupling;
    BoundMode mode = BoundMode::sum;
    /// Integer multiplying (tau0 * max_scale)^exponent * min_scale * T.
    BigInt coefficient = 0;
    unsigned exponent = 0;
    std::uint64_t n_slots = 0;
    double tau0 = 0;
    double duration = 0;
    double value = 0;
};

/// EPG <= T * sum_u |B_u^s| at leading order. Sum mode keeps every axis at the
/// lowest exponent; dominant mode keeps the largest of those. Throws
/// RegimeError when beta and j are within `regime_ratio` of each other.
EpgBound epg_bound(const ProjectionString &s, double tau0, double beta, double j, BoundMode mode,
                   double regime_ratio = 10.0);

enum class CddVariant { cdd, blocked };
/// log2 of the dominant-mode coefficient for (xy)^alpha or x^alpha y^alpha.
unsigned cdd_family_bound(int alpha, CddVariant variant);
ProjectionString cdd_family_word(int alpha, CddVariant variant);

}  // namespace ddkit
