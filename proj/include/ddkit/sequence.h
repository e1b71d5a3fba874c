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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ddkit/walsh.h"

namespace ddkit {

/// Projection label: p_0 (repeat), p_x, p_y, p_z.
enum class Letter : std::uint8_t { zero = 0, x = 1, y = 2, z = 3 };

/// Physical Pauli axis, usable as an index 0..2.
enum class Axis : std::uint8_t { x = 0, y = 1, z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};

/// Single-qubit Pauli up to phase, stored as its symplectic (x-part, z-part)
/// bits so the projective product is XOR.
enum class Pauli : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

inline Pauli operator*(Pauli a, Pauli b) {
    return static_cast<Pauli>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}
char to_char(Pauli p);
Pauli pauli_from_char(char c);
char to_char(Letter l);
char to_char(Axis a);
Letter letter_from_char(char c);
Pauli pauli_of(Axis a);
std::optional<Axis> axis_of(Letter l);

/// Bitmask of switching-function flips: bit u set means axis u toggles.
using AxisFlips = std::uint8_t;
inline constexpr AxisFlips flip_bit(Axis a) {
    return static_cast<AxisFlips>(1u << static_cast<unsigned>(a));
}
AxisFlips flips_of(Letter l);
/// Projective product of the Paulis whose flip bits are set.
Pauli pauli_of_flips(AxisFlips f);

/// Pulse applied at the end of a slot. `flips` records which switching functions
/// toggle there; `events` counts the unmerged projection pulses it absorbed.
struct Pulse {
    AxisFlips flips = 0;
    std::uint32_t events = 0;

    Pauli label() const {
        return pauli_of_flips(flips);
    }
    bool operator==(const Pulse &) const = default;
};

/// N_T equal free-evolution slots of length tau0, each followed by a pulse.
class PulseSchedule {
   public:
    /// Throws std::invalid_argument unless the slot count is a power of two,
    /// tau0 > 0, and the ordered pulse product is proportional to identity.
    PulseSchedule(double tau0_s, std::vector<Pulse> pulses);

    /// Builds a schedule from bare labels; X, Y, Z map to single-axis flips.
    static PulseSchedule from_labels(double tau0_s, const std::vector<Pauli> &labels);

    std::uint64_t n_slots() const {
        return pulses_.size();
    }
    double tau0() const {
        return tau0_;
    }
    double duration() const {
        return tau0_ * static_cast<double>(pulses_.size());
    }
    const std::vector<Pulse> &pulses() const {
        return pulses_;
    }
    std::vector<Pauli> labels() const;
    std::string labels_str() const;

    PulseSchedule with_tau0(double tau0_s) const;

    bool operator==(const PulseSchedule &) const = default;

   private:
    double tau0_;
    std::vector<Pulse> pulses_;
};

/// Word s = s_m ... s_1 over {0,x,y,z}. letters()[0] is s_m, the innermost
/// (first applied) projection; the last letter s_1 is the outermost.
class ProjectionString {
   public:
    ProjectionString() = default;
    explicit ProjectionString(std::vector<Letter> letters);
    /// Throws std::invalid_argument on an empty word or a foreign character.
    static ProjectionString parse(std::string_view word);

    std::size_t size() const {
        return letters_.size();
    }
    const std::vector<Letter> &letters() const {
        return letters_;
    }
    /// s_j, with j = 1 the rightmost (outermost) letter.
    Letter digit(std::size_t j) const;
    /// (r_x, r_y, r_z).
    std::array<std::size_t, 3> axis_counts() const;
    std::string str() const;

    bool operator==(const ProjectionString &) const = default;
    bool operator<(const ProjectionString &other) const {
        return letters_ < other.letters_;
    }

   private:
    std::vector<Letter> letters_;
};

/// Raised when two Paley orders share a nonzero binary digit.
class ConstraintViolation : public std::invalid_argument {
   public:
    ConstraintViolation(std::size_t bit, const std::string &what) : std::invalid_argument(what), bit_(bit) {
    }
    /// 1-indexed binary position of the first collision.
    std::size_t bit() const {
        return bit_;
    }

   private:
    std::size_t bit_;
};

/// First 1-indexed bit position carrying more than one nonzero digit, if any.
std::optional<std::size_t> first_digit_collision(const PaleyVector &v);
/// Throws ConstraintViolation naming the colliding bit.
void check_one_digit_constraint(const PaleyVector &v);

PulseSchedule projection(Letter axis, double tau0_s = 1.0);
PulseSchedule concatenate(Letter outer, const PulseSchedule &inner);
PulseSchedule compile(const ProjectionString &s, double tau0_s = 1.0);

PaleyVector cpdd_to_gwdd(const ProjectionString &s);
ProjectionString gwdd_to_cpdd(const PaleyVector &v);

int cancellation_order(const ProjectionString &s);
int cancellation_order(std::array<std::size_t, 3> counts);

ProjectionString cdd(int r);
ProjectionString ga8(int r);
ProjectionString owdd_h(int alpha);
ProjectionString owdd_l(int alpha);

/// CO-equivalence class of optimal Walsh sequences at order alpha.
struct OwddClass {
    int order = 0;
    int parity_bit = 0;
    /// Sorted ascending: ((a - p)/2, (a + p)/2, (a + p)/2).
    std::array<std::size_t, 3> axis_counts{};
    std::size_t length = 0;
    std::uint64_t n_slots = 0;
    /// Number of distinct words in the class.
    std::uint64_t size = 0;
};
OwddClass owdd_class(int alpha);
std::uint64_t owdd_slot_count(int alpha);

/// Lazy, restartable enumeration of every word in OWDD_alpha. Words are
/// emitted grouped by axis-count assignment, each group in lexicographic
/// order of the letters x < y < z.
class OwddEnumerator {
   public:
    explicit OwddEnumerator(int alpha);
    std::optional<ProjectionString> next();
    void reset();

   private:
    bool load_assignment();

    std::vector<std::array<std::size_t, 3>> assignments_;
    std::size_t assignment_ = 0;
    std::vector<Letter> word_;
    bool fresh_ = true;
};
std::vector<ProjectionString> owdd_enumerate(int alpha);

enum class MergePolicy { merge, keep_events };
std::uint64_t pulse_count(const PulseSchedule &sched, MergePolicy policy = MergePolicy::merge);

/// Tracks the switching-function exponents slot by slot from the recorded flips.
SwitchingFunctions schedule_to_switching(const PulseSchedule &sched);

}  // namespace ddkit
