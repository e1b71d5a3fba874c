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

#include "ddkit/bounds.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ddkit {

NormState renormalize_norms(const NormState &state, Axis axis) {
    const int u = static_cast<int>(axis);
    const int v = (u + 1) % 3;
    const int w = (u + 2) % 3;
    NormState next = state;
    next.j[v] = state.duration * (state.beta * state.j[v] + state.j[w] * state.j[u]);
    next.j[w] = state.duration * (state.beta * state.j[w] + state.j[v] * state.j[u]);
    next.duration = 2 * state.duration;
    return next;
}

NormState renormalize_norms(const NormState &state, Letter letter) {
    if (auto a = axis_of(letter)) {
        return renormalize_norms(state, *a);
    }
    NormState next = state;
    next.duration = 2 * state.duration;
    return next;
}

LMatrix build_l_matrix(const ProjectionString &s) {
    LMatrix l;
    for (auto &row : l.rows) {
        row.assign(s.size(), 0);
    }
    for (std::size_t j = 0; j < s.size(); j++) {
        if (auto a = axis_of(s.letters()[j])) {
            l.rows[static_cast<int>(*a)][j] = 1;
        }
    }
    return l;
}

AxisPrefactor axis_prefactor(const ProjectionString &s, Axis axis) {
    AxisPrefactor out;
    const LMatrix l = build_l_matrix(s);
    for (std::size_t j = 1; j <= l.columns(); j++) {
        if (s.letters()[j - 1] == Letter::zero) {
            continue;  // repetition renormalizes nothing
        }
        if (!l.at(axis, j)) {
            out.log2_prefactor += static_cast<unsigned>(j - 1);
            out.exponent++;
        }
    }
    out.prefactor = BigInt(1) << out.log2_prefactor;
    return out;
}

const char *to_string(BoundMode m) {
    return m == BoundMode::sum ? "sum" : "dominant";
}

const char *to_string(Regime r) {
    return r == Regime::weak_coupling ? "weak-coupling" : "strong-coupling";
}

BoundMode bound_mode_from_string(const std::string &s) {
    if (s == "sum") {
        return BoundMode::sum;
    }
    if (s == "dominant") {
        return BoundMode::dominant;
    }
    throw std::invalid_argument("unknown bound mode '" + s + "'");
}

EpgBound epg_bound(const ProjectionString &s, double tau0, double beta, double j, BoundMode mode,
                   double regime_ratio) {
    if (!(tau0 > 0) || beta < 0 || j < 0) {
        throw std::invalid_argument("tau0 must be positive and coupling scales non-negative");
    }
    const double hi = std::max(beta, j);
    const double lo = std::min(beta, j);
    if (lo > 0 && hi / lo < regime_ratio) {
        throw RegimeError("no analytic bound: beta = " + std::to_string(beta) + " and J = " + std::to_string(j) +
                          " are within a factor " + std::to_string(regime_ratio) + " of each other");
    }

    EpgBound out;
    out.word = s;
    out.mode = mode;
    out.regime = beta >= j ? Regime::weak_coupling : Regime::strong_coupling;
    out.tau0 = tau0;
    out.n_slots = std::uint64_t{1} << s.size();
    out.duration = tau0 * static_cast<double>(out.n_slots);

    unsigned min_exp = std::numeric_limits<unsigned>::max();
    for (Axis a : kAxes) {
        out.per_axis[static_cast<int>(a)] = axis_prefactor(s, a);
        min_exp = std::min(min_exp, out.per_axis[static_cast<int>(a)].exponent);
    }
    out.exponent = min_exp;

    // Axes of strictly higher order are dropped in both modes.
    int best = -1;
    for (int u = 0; u < 3; u++) {
        if (out.per_axis[u].exponent != min_exp) {
            continue;
        }
        if (mode == BoundMode::sum) {
            out.retained[u] = true;
            out.coefficient += out.per_axis[u].prefactor;
        } else if (best < 0 || out.per_axis[u].prefactor > out.per_axis[best].prefactor) {
            best = u;
        }
    }
    if (mode == BoundMode::dominant) {
        out.retained[best] = true;
        out.coefficient = out.per_axis[best].prefactor;
    }

    out.value = out.coefficient.convert_to<double>() * std::pow(tau0 * hi, static_cast<double>(min_exp)) * lo *
                out.duration;
    return out;
}

ProjectionString cdd_family_word(int alpha, CddVariant variant) {
    if (variant == CddVariant::cdd) {
        return cdd(alpha);
    }
    if (alpha < 1) {
        throw std::invalid_argument("order must be >= 1");
    }
    return ProjectionString::parse(std::string(alpha, 'x') + std::string(alpha, 'y'));
}

unsigned cdd_family_bound(int alpha, CddVariant variant) {
    const ProjectionString s = cdd_family_word(alpha, variant);
    unsigned min_exp = std::numeric_limits<unsigned>::max();
    unsigned best = 0;
    for (Axis a : kAxes) {
        AxisPrefactor p = axis_prefactor(s, a);
        if (p.exponent < min_exp) {
            min_exp = p.exponent;
            best = p.log2_prefactor;
        } else if (p.exponent == min_exp) {
            best = std::max(best, p.log2_prefactor);
        }
    }
    return best;
}

}  // namespace ddkit
