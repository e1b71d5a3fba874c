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

#include <string>

#include "ddkit/bounds.h"
#include "ddkit/sequence.h"

namespace ddkit {

/// {"tau0_s", "n_slots", "pulses": ["X", ...], "flips": ["xz", ...], "events": [...]}.
/// "flips" and "events" are optional on input; without them each label is read
/// as a single-axis flip.
std::string schedule_to_json(const PulseSchedule &sched);
/// Throws std::invalid_argument on a malformed document.
PulseSchedule schedule_from_json(const std::string &text);

/// {"string", "per_axis": {"x": [prefactor, exponent], ...}, "mode", "T_slots", "bound_value", ...}.
/// Prefactors too large for 64 bits are written as decimal strings.
std::string bound_to_json(const EpgBound &bound);

/// "[nx,ny,nz]" for JSON consumers.
std::string paley_to_json(const PaleyVector &v);

}  // namespace ddkit
