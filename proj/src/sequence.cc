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

#include "ddkit/sequence.h"

#include <algorithm>
#include <cmath>

namespace ddkit {

char to_char(Pauli p) {
    switch (p) {
        case Pauli::I:
            return 'I';
        case Pauli::X:
            return 'X';
        case Pauli::Y:
            return 'Y';
        case Pauli::Z:
            return 'Z';
    }
    return '?';
}

Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I':
            return Pauli::I;
        case 'X':
            return Pauli::X;
        case 'Y':
            return Pauli::Y;
        case 'Z':
            return Pauli::Z;
        default:
            throw std::invalid_argument(std::string("not a Pauli label: '") + c + "'");
    }
}

char to_char(Letter l) {
    return "0xyz"[static_cast<int>(l)];
}

char to_char(Axis a) {
    return "xyz"[static_cast<int>(a)];
}

Letter letter_from_char(char c) {
    switch (c) {
        case '0':
            return Letter::zero;
        case 'x':
            return Letter::x;
        case 'y':
            return Letter::y;
        case 'z':
            return Letter::z;
        default:
            throw std::invalid_argument(std::string("not a projection letter: '") + c + "'");
    }
}

Pauli pauli_of(Axis a) {
    switch (a) {
        case Axis::x:
            return Pauli::X;
        case Axis::y:
            return Pauli::Y;
        case Axis::z:
            return Pauli::Z;
    }
    return Pauli::I;
}

std::optional<Axis> axis_of(Letter l) {
    if (l == Letter::zero) {
        return std::nullopt;
    }
    return static_cast<Axis>(static_cast<int>(l) - 1);
}

AxisFlips flips_of(Letter l) {
    auto a = axis_of(l);
    return a ? flip_bit(*a) : AxisFlips{0};
}

Pauli pauli_of_flips(AxisFlips f) {
    Pauli p = Pauli::I;
    for (Axis a : kAxes) {
        if (f & flip_bit(a)) {
            p = p * pauli_of(a);
        }
    }
    return p;
}

PulseSchedule::PulseSchedule(double tau0_s, std::vector<Pulse> pulses) : tau0_(tau0_s), pulses_(std::move(pulses)) {
    if (!(tau0_ > 0) || !std::isfinite(tau0_)) {
        throw std::invalid_argument("tau0 must be positive and finite");
    }
    if (!is_power_of_two(pulses_.size())) {
        throw std::invalid_argument("slot count " + std::to_string(pulses_.size()) + " is not a power of two");
    }
    Pauli total = Pauli::I;
    for (const auto &p : pulses_) {
        if (p.flips > 7) {
            throw std::invalid_argument("invalid flip mask");
        }
        total = p.label() * total;
    }
    if (total != Pauli::I) {
        throw std::invalid_argument("pulse product is " + std::string(1, to_char(total)) +
                                    ", not proportional to identity");
    }
}

PulseSchedule PulseSchedule::from_labels(double tau0_s, const std::vector<Pauli> &labels) {
    std::vector<Pulse> pulses;
    pulses.reserve(labels.size());
    for (Pauli p : labels) {
        switch (p) {
            case Pauli::I:
                pulses.push_back({0, 0});
                break;
            case Pauli::X:
                pulses.push_back({flip_bit(Axis::x), 1});
                break;
            case Pauli::Y:
                pulses.push_back({flip_bit(Axis::y), 1});
                break;
            case Pauli::Z:
                pulses.push_back({flip_bit(Axis::z), 1});
                break;
        }
    }
    return PulseSchedule(tau0_s, std::move(pulses));
}

std::vector<Pauli> PulseSchedule::labels() const {
    std::vector<Pauli> out;
    out.reserve(pulses_.size());
    for (const auto &p : pulses_) {
        out.push_back(p.label());
    }
    return out;
}

std::string PulseSchedule::labels_str() const {
    std::string out;
    for (const auto &p : pulses_) {
        out += to_char(p.label());
    }
    return out;
}

PulseSchedule PulseSchedule::with_tau0(double tau0_s) const {
    return PulseSchedule(tau0_s, pulses_);
}

ProjectionString::ProjectionString(std::vector<Letter> letters) : letters_(std::move(letters)) {
    if (letters_.empty()) {
        throw std::invalid_argument("projection string must be non-empty");
    }
}

ProjectionString ProjectionString::parse(std::string_view word) {
    std::vector<Letter> letters;
    letters.reserve(word.size());
    for (char c : word) {
        letters.push_back(letter_from_char(c));
    }
    return ProjectionString(std::move(letters));
}

Letter ProjectionString::digit(std::size_t j) const {
    if (j == 0 || j > letters_.size()) {
        throw std::out_of_range("string position out of range");
    }
    return letters_[letters_.size() - j];
}

std::array<std::size_t, 3> ProjectionString::axis_counts() const {
    std::array<std::size_t, 3> r{};
    for (Letter l : letters_) {
        if (auto a = axis_of(l)) {
            r[static_cast<int>(*a)]++;
        }
    }
    return r;
}

std::string ProjectionString::str() const {
    std::string out;
    for (Letter l : letters_) {
        out += to_char(l);
    }
    return out;
}

std::optional<std::size_t> first_digit_collision(const PaleyVector &v) {
    std::size_t m = v.bit_length();
    for (std::size_t j = 1; j <= m; j++) {
        int hits = v.x().bit(j) + v.y().bit(j) + v.z().bit(j);
        if (hits > 1) {
            return j;
        }
    }
    return std::nullopt;
}

void check_one_digit_constraint(const PaleyVector &v) {
    if (auto j = first_digit_collision(v)) {
        std::string axes;
        for (std::size_t u = 0; u < 3; u++) {
            if (v.n[u].bit(*j)) {
                axes += axes.empty() ? "" : " and ";
                axes += std::string("n_") + "xyz"[u];
            }
        }
        throw ConstraintViolation(*j, "Paley vector " + v.str() + " violates the one-nonzero-digit constraint: bit " +
                                          std::to_string(*j) + " is set in " + axes);
    }
}

PulseSchedule projection(Letter axis, double tau0_s) {
    Pulse p{flips_of(axis), axis == Letter::zero ? 0u : 1u};
    return PulseSchedule(tau0_s, {p, p});
}

PulseSchedule concatenate(Letter outer, const PulseSchedule &inner) {
    // Each of the two free slots of p_outer is replaced by the inner sequence; the
    // outer pulse coincides with the inner's closing pulse and merges into it.
    std::vector<Pulse> body = inner.pulses();
    Pulse &last = body.back();
    last.flips ^= flips_of(outer);
    last.events += outer == Letter::zero ? 0 : 1;
    std::vector<Pulse> out;
    out.reserve(2 * body.size());
    out.insert(out.end(), body.begin(), body.end());
    out.insert(out.end(), body.begin(), body.end());
    return PulseSchedule(inner.tau0(), std::move(out));
}

PulseSchedule compile(const ProjectionString &s, double tau0_s) {
    PulseSchedule sched(tau0_s, {Pulse{}});
    for (Letter l : s.letters()) {
        sched = concatenate(l, sched);
    }
    return sched;
}

PaleyVector cpdd_to_gwdd(const ProjectionString &s) {
    std::array<BigInt, 3> n{0, 0, 0};
    for (std::size_t j = 1; j <= s.size(); j++) {
        if (auto a = axis_of(s.digit(j))) {
            boost::multiprecision::bit_set(n[static_cast<int>(*a)], static_cast<unsigned>(j - 1));
        }
    }
    return PaleyVector{{PaleyOrder(n[0]), PaleyOrder(n[1]), PaleyOrder(n[2])}};
}

ProjectionString gwdd_to_cpdd(const PaleyVector &v) {
    check_one_digit_constraint(v);
    const std::size_t m = std::max<std::size_t>(v.bit_length(), 1);
    std::vector<Letter> letters(m, Letter::zero);
    for (std::size_t j = 1; j <= m; j++) {
        for (Axis a : kAxes) {
            if (v.n[static_cast<int>(a)].bit(j)) {
                letters[m - j] = static_cast<Letter>(static_cast<int>(a) + 1);
            }
        }
    }
    return ProjectionString(std::move(letters));
}

int cancellation_order(std::array<std::size_t, 3> r) {
    return static_cast<int>(std::min({r[1] + r[2], r[0] + r[2], r[0] + r[1]}));
}

int cancellation_order(const ProjectionString &s) {
    return cancellation_order(s.axis_counts());
}

namespace {

void require_positive(int v, const char *what) {
    if (v < 1) {
        throw std::invalid_argument(std::string(what) + " must be >= 1, got " + std::to_string(v));
    }
}

ProjectionString repeat(std::string_view unit, int r) {
    std::string word;
    for (int i = 0; i < r; i++) {
        word += unit;
    }
    return ProjectionString::parse(word);
}

std::uint64_t multinomial(const std::array<std::size_t, 3> &counts) {
    // Built up as a product of binomials to stay exact.
    std::uint64_t result = 1;
    std::size_t total = 0;
    for (std::size_t c : counts) {
        for (std::size_t i = 1; i <= c; i++) {
            total++;
            result = result * total / i;
        }
    }
    return result;
}

}  // namespace

ProjectionString cdd(int r) {
    require_positive(r, "CDD level");
    return repeat("xy", r);
}

ProjectionString ga8(int r) {
    require_positive(r, "GA8 level");
    return repeat("zyx", r);
}

OwddClass owdd_class(int alpha) {
    require_positive(alpha, "cancellation order");
    if (alpha > 40) {
        throw std::invalid_argument("cancellation order too large for 64-bit slot counts");
    }
    OwddClass c;
    c.order = alpha;
    c.parity_bit = alpha % 2;
    const auto lo = static_cast<std::size_t>((alpha - c.parity_bit) / 2);
    const auto hi = static_cast<std::size_t>((alpha + c.parity_bit) / 2);
    c.axis_counts = {lo, hi, hi};
    c.length = static_cast<std::size_t>((3 * alpha + c.parity_bit) / 2);
    c.n_slots = std::uint64_t{1} << c.length;
    c.size = (c.parity_bit ? 3 : 1) * multinomial(c.axis_counts);
    return c;
}

std::uint64_t owdd_slot_count(int alpha) {
    return owdd_class(alpha).n_slots;
}

ProjectionString owdd_h(int alpha) {
    const std::size_t m = owdd_class(alpha).length;
    std::vector<Letter> letters;
    for (std::size_t i = 0; i < m; i++) {
        letters.push_back(static_cast<Letter>(1 + i % 3));
    }
    return ProjectionString(std::move(letters));
}

ProjectionString owdd_l(int alpha) {
    const auto c = owdd_class(alpha);
    const std::size_t rx = c.axis_counts[2], ry = c.axis_counts[1], rz = c.axis_counts[0];
    std::vector<Letter> letters;
    letters.insert(letters.end(), rx, Letter::x);
    letters.insert(letters.end(), ry, Letter::y);
    letters.insert(letters.end(), rz, Letter::z);
    return ProjectionString(std::move(letters));
}

OwddEnumerator::OwddEnumerator(int alpha) {
    auto counts = owdd_class(alpha).axis_counts;
    std::sort(counts.begin(), counts.end());
    do {
        assignments_.push_back(counts);
    } while (std::next_permutation(counts.begin(), counts.end()));
    reset();
}

void OwddEnumerator::reset() {
    assignment_ = 0;
    fresh_ = true;
    load_assignment();
}

bool OwddEnumerator::load_assignment() {
    if (assignment_ >= assignments_.size()) {
        return false;
    }
    const auto &r = assignments_[assignment_];
    word_.clear();
    word_.insert(word_.end(), r[0], Letter::x);
    word_.insert(word_.end(), r[1], Letter::y);
    word_.insert(word_.end(), r[2], Letter::z);
    return true;
}

std::optional<ProjectionString> OwddEnumerator::next() {
    if (assignment_ >= assignments_.size()) {
        return std::nullopt;
    }
    if (fresh_) {
        fresh_ = false;
        return ProjectionString(word_);
    }
    if (!std::next_permutation(word_.begin(), word_.end())) {
        assignment_++;
        if (!load_assignment()) {
            return std::nullopt;
        }
    }
    return ProjectionString(word_);
}

std::vector<ProjectionString> owdd_enumerate(int alpha) {
    std::vector<ProjectionString> out;
    OwddEnumerator e(alpha);
    while (auto s = e.next()) {
        out.push_back(std::move(*s));
    }
    return out;
}

std::uint64_t pulse_count(const PulseSchedule &sched, MergePolicy policy) {
    std::uint64_t n = 0;
    for (const auto &p : sched.pulses()) {
        n += policy == MergePolicy::merge ? (p.label() != Pauli::I) : p.events;
    }
    return n;
}

SwitchingFunctions schedule_to_switching(const PulseSchedule &sched) {
    SwitchingFunctions out;
    out.n_slots = sched.n_slots();
    for (auto &v : out.axis) {
        v.reserve(out.n_slots);
    }
    AxisFlips frame = 0;
    for (const auto &p : sched.pulses()) {
        for (Axis a : kAxes) {
            out.axis[static_cast<int>(a)].push_back(frame & flip_bit(a) ? +1 : -1);
        }
        frame ^= p.flips;
    }
    return out;
}

}  // namespace ddkit
