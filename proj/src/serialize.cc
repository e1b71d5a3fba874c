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

#include "ddkit/serialize.h"

#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace ddkit {

using json = nlohmann::json;

namespace {

std::string flips_str(AxisFlips f) {
    std::string out;
    for (Axis a : kAxes) {
        if (f & flip_bit(a)) {
            out += to_char(a);
        }
    }
    return out;
}

AxisFlips flips_from_str(const std::string &s) {
    AxisFlips f = 0;
    for (char c : s) {
        const auto axis = axis_of(letter_from_char(c));
        if (!axis) {
            throw std::invalid_argument("flip entries use the letters x, y, z");
        }
        f ^= flip_bit(*axis);
    }
    return f;
}

json big_or_string(const BigInt &v) {
    if (v <= std::numeric_limits<std::uint64_t>::max()) {
        return json(v.convert_to<std::uint64_t>());
    }
    return json(v.str());
}

}  // namespace

std::string schedule_to_json(const PulseSchedule &sched) {
    json pulses = json::array();
    json flips = json::array();
    json events = json::array();
    for (const Pulse &p : sched.pulses()) {
        pulses.push_back(std::string(1, to_char(p.label())));
        flips.push_back(flips_str(p.flips));
        events.push_back(p.events);
    }
    json doc{{"tau0_s", sched.tau0()}, {"n_slots", sched.n_slots()}, {"pulses", pulses},
             {"flips", flips},         {"events", events}};
    return doc.dump(2);
}

PulseSchedule schedule_from_json(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
        const double tau0 = doc.at("tau0_s").get<double>();
        const auto &labels = doc.at("pulses");
        if (!labels.is_array()) {
            throw std::invalid_argument("'pulses' must be an array");
        }
        if (doc.contains("n_slots") && doc.at("n_slots").get<std::size_t>() != labels.size()) {
            throw std::invalid_argument("'n_slots' disagrees with the pulse list");
        }
        if (!doc.contains("flips")) {
            std::vector<Pauli> ps;
            for (const auto &l : labels) {
                const auto s = l.get<std::string>();
                if (s.size() != 1) {
                    throw std::invalid_argument("pulse labels are single letters");
                }
                ps.push_back(pauli_from_char(s[0]));
            }
            return PulseSchedule::from_labels(tau0, ps);
        }
        const auto &flips = doc.at("flips");
        if (flips.size() != labels.size()) {
            throw std::invalid_argument("'flips' disagrees with the pulse list");
        }
        std::vector<Pulse> pulses;
        for (std::size_t k = 0; k < labels.size(); k++) {
            Pulse p;
            p.flips = flips_from_str(flips[k].get<std::string>());
            const auto label = labels[k].get<std::string>();
            if (label.size() != 1 || pauli_from_char(label[0]) != p.label()) {
                throw std::invalid_argument("pulse " + std::to_string(k) + " label disagrees with its flips");
            }
            p.events = doc.contains("events") ? doc.at("events").at(k).get<std::uint32_t>()
                                              : static_cast<std::uint32_t>(p.flips != 0);
            pulses.push_back(p);
        }
        return PulseSchedule(tau0, std::move(pulses));
    } catch (const json::exception &e) {
        throw std::invalid_argument(std::string("malformed schedule JSON: ") + e.what());
    }
}

std::string bound_to_json(const EpgBound &b) {
    json per_axis = json::object();
    for (Axis a : kAxes) {
        const auto &p = b.per_axis[static_cast<int>(a)];
        per_axis[std::string(1, to_char(a))] = json::array({big_or_string(p.prefactor), p.exponent});
    }
    json retained = json::array();
    for (Axis a : kAxes) {
        if (b.retained[static_cast<int>(a)]) {
            retained.push_back(std::string(1, to_char(a)));
        }
    }
    json doc{{"string", b.word.str()},
             {"per_axis", per_axis},
             {"retained", retained},
             {"mode", to_string(b.mode)},
             {"regime", to_string(b.regime)},
             {"coefficient", big_or_string(b.coefficient)},
             {"exponent", b.exponent},
             {"T_slots", b.n_slots},
             {"tau0_s", b.tau0},
             {"duration_s", b.duration},
             {"bound_value", b.value}};
    return doc.dump(2);
}

std::string paley_to_json(const PaleyVector &v) {
    json arr = json::array();
    for (const auto &n : v.n) {
        const BigInt &b = n.value();
        arr.push_back(big_or_string(b));
    }
    return arr.dump();
}

}  // namespace ddkit
