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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddkit/dynamics.h"
#include "ddkit/sequence.h"

namespace ddkit {

enum class Family { cdd, owdd_h, owdd_l, owdd_class_envelope };
const char *to_string(Family f);
Family family_from_string(const std::string &s);

/// What to do with realizations where |H| T >= pi. `keep` records their
/// fidelity loss and leaves the EPG unset; `exclude` drops them from the statistics.
enum class ConvergencePolicy { keep, exclude };
const char *to_string(ConvergencePolicy p);

class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct ScanConfig {
    double beta_hz = 1e4;
    double j_hz = 1e6;
    double tau0_s = 1e-7;
    int n_bath = 3;
    int realizations = 500;
    std::uint64_t master_seed = 0;
    std::vector<Family> families{Family::cdd, Family::owdd_h, Family::owdd_l, Family::owdd_class_envelope};
    std::vector<int> orders{1, 2, 3, 4};
    int max_class_samples = 64;
    /// Reuse realization i (bath, state) across every family and order.
    bool paired = true;
    ConvergencePolicy convergence = ConvergencePolicy::keep;
    bool compute_epg = true;
    /// Worker threads; 0 means all cores. Never affects results.
    int threads = 0;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Parses the JSON config format. Throws ConfigError with line/column or field context.
ScanConfig parse_config(const std::string &text);
ScanConfig load_config(const std::filesystem::path &path);
std::string config_to_json(const ScanConfig &config);

struct RealizationSample {
    double loss = 0;
    double fidelity = 1;
    /// |H| T < pi.
    bool converged = true;
    bool excluded = false;
    std::optional<double> epg;
};

/// Child seed. Paired configs hash (master_seed, index); otherwise
/// (master_seed, family, order, index).
std::uint64_t realization_seed(const ScanConfig &config, Family family, int order, int index);

/// Sequence a family uses at cancellation order alpha. Not defined for the envelope.
ProjectionString family_sequence(Family family, int alpha);

/// Random bath, Haar-random qubit state, and random bath bit string.
struct Realization {
    SpinBathModel model;
    Vector2 psi;
    std::vector<int> bath_bits;
};
Realization draw_realization(const ScanConfig &config, std::uint64_t seed);

RealizationSample run_realization(const ScanConfig &config, Family family, int order, int index);
RealizationSample run_realization(const ScanConfig &config, const ProjectionString &s, std::uint64_t seed);
/// Unpulsed evolution for n_slots * tau0 on the same realization.
RealizationSample run_free_evolution(const ScanConfig &config, std::uint64_t n_slots, std::uint64_t seed);

struct ScanRecord {
    std::string family;
    int order = 0;
    std::string sequence;
    std::uint64_t n_slots = 0;
    double duration_s = 0;
    double mean_loss = 0;
    double std_loss = 0;
    double min_loss = 0;
    double max_loss = 0;
    int n_ok = 0;
    int n_excluded = 0;

    bool operator==(const ScanRecord &) const = default;
};

/// Fidelity and exact EPG of one simulated run, for bound checks.
struct SampleTrace {
    std::string sequence;
    int index = 0;
    double fidelity = 1;
    std::optional<double> epg;
};

struct ScanResult {
    std::vector<ScanRecord> records;
    std::vector<SampleTrace> samples;
};

/// Members of OWDD_alpha used for the envelope: the whole class when it fits
/// under `cap`, otherwise owdd_h, owdd_l and an evenly strided subset.
std::vector<ProjectionString> class_members(int alpha, int cap);

std::vector<ScanRecord> run_scan(const ScanConfig &config);
ScanResult run_scan_detailed(const ScanConfig &config);

enum class OutputFormat { csv, json };
std::string records_to_csv(const std::vector<ScanRecord> &records);
std::string records_to_json(const std::vector<ScanRecord> &records, const ScanConfig *config = nullptr);
std::vector<ScanRecord> records_from_json(const std::string &text);
/// Throws std::runtime_error naming the path on I/O failure.
void persist(const std::vector<ScanRecord> &records, const std::filesystem::path &path, OutputFormat format,
             const ScanConfig *config = nullptr);

inline constexpr const char *kFidelityLossDefinition = "1 - sqrt(<psi|rho_S|psi>)";
inline constexpr const char *kUnitsConvention = "beta and J are operator norms in 1/s; hbar = 1; no 2*pi factor";

}  // namespace ddkit
