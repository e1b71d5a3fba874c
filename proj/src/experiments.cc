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

#include "ddkit/experiments.h"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace ddkit {

using json = nlohmann::json;

const char *to_string(Family f) {
    switch (f) {
        case Family::cdd:
            return "cdd";
        case Family::owdd_h:
            return "owdd_h";
        case Family::owdd_l:
            return "owdd_l";
        case Family::owdd_class_envelope:
            return "owdd_class_envelope";
    }
    return "?";
}

Family family_from_string(const std::string &s) {
    for (Family f : {Family::cdd, Family::owdd_h, Family::owdd_l, Family::owdd_class_envelope}) {
        if (s == to_string(f)) {
            return f;
        }
    }
    throw std::invalid_argument("unknown family '" + s + "'");
}

const char *to_string(ConvergencePolicy p) {
    return p == ConvergencePolicy::keep ? "keep" : "exclude";
}

void ScanConfig::validate() const {
    auto fail = [](const std::string &field, const std::string &why) {
        throw ConfigError("field '" + field + "': " + why);
    };
    if (!(tau0_s > 0) || !std::isfinite(tau0_s)) {
        fail("tau0_s", "must be positive");
    }
    if (!(beta_hz >= 0) || !std::isfinite(beta_hz)) {
        fail("beta_hz", "must be non-negative");
    }
    if (!(j_hz >= 0) || !std::isfinite(j_hz)) {
        fail("j_hz", "must be non-negative");
    }
    if (n_bath < 2 || n_bath > 6) {
        fail("n_bath", "must be between 2 and 6");
    }
    if (realizations < 1) {
        fail("realizations", "must be >= 1");
    }
    if (families.empty()) {
        fail("families", "must not be empty");
    }
    if (orders.empty()) {
        fail("orders", "must not be empty");
    }
    for (int a : orders) {
        if (a < 1 || a > 12) {
            fail("orders", "each order must be between 1 and 12");
        }
    }
    if (max_class_samples < 2) {
        fail("max_class_samples", "must be >= 2");
    }
    if (threads < 0) {
        fail("threads", "must be >= 0");
    }
}

namespace {

std::string position_of(const std::string &text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); i++) {
        if (text[i] == '\n') {
            line++;
            col = 1;
        } else {
            col++;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <typename T>
T field_as(const json &j, const std::string &key) {
    const json &v = j.at(key);
    try {
        if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) {
                throw ConfigError("field '" + key + "': expected a number");
            }
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) {
                throw ConfigError("field '" + key + "': expected true or false");
            }
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) {
                throw ConfigError("field '" + key + "': expected an integer");
            }
            if constexpr (std::is_unsigned_v<T>) {
                if (!v.is_number_unsigned()) {
                    throw ConfigError("field '" + key + "': expected a non-negative integer");
                }
            }
        }
        return v.get<T>();
    } catch (const json::exception &e) {
        throw ConfigError("field '" + key + "': " + e.what());
    }
}

}  // namespace

ScanConfig parse_config(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError("malformed JSON at " + position_of(text, e.byte) + ": " + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    static const std::set<std::string> kKnown{"beta_hz",  "j_hz",       "tau0_s",          "n_bath",
                                              "realizations", "master_seed", "families",   "orders",
                                              "max_class_samples", "paired", "convergence_policy",
                                              "compute_epg", "threads"};
    for (const auto &[key, value] : j.items()) {
        if (!kKnown.count(key)) {
            throw ConfigError("unknown field '" + key + "'");
        }
    }
    ScanConfig c;
    if (j.contains("beta_hz")) c.beta_hz = field_as<double>(j, "beta_hz");
    if (j.contains("j_hz")) c.j_hz = field_as<double>(j, "j_hz");
    if (j.contains("tau0_s")) c.tau0_s = field_as<double>(j, "tau0_s");
    if (j.contains("n_bath")) c.n_bath = field_as<int>(j, "n_bath");
    if (j.contains("realizations")) c.realizations = field_as<int>(j, "realizations");
    if (j.contains("master_seed")) c.master_seed = field_as<std::uint64_t>(j, "master_seed");
    if (j.contains("max_class_samples")) c.max_class_samples = field_as<int>(j, "max_class_samples");
    if (j.contains("paired")) c.paired = field_as<bool>(j, "paired");
    if (j.contains("compute_epg")) c.compute_epg = field_as<bool>(j, "compute_epg");
    if (j.contains("threads")) c.threads = field_as<int>(j, "threads");
    if (j.contains("convergence_policy")) {
        const json &v = j.at("convergence_policy");
        if (v == "keep") {
            c.convergence = ConvergencePolicy::keep;
        } else if (v == "exclude") {
            c.convergence = ConvergencePolicy::exclude;
        } else {
            throw ConfigError("field 'convergence_policy': expected \"keep\" or \"exclude\"");
        }
    }
    if (j.contains("families")) {
        const json &v = j.at("families");
        if (!v.is_array()) {
            throw ConfigError("field 'families': expected an array of family names");
        }
        c.families.clear();
        for (const json &f : v) {
            if (!f.is_string()) {
                throw ConfigError("field 'families': expected strings");
            }
            try {
                c.families.push_back(family_from_string(f.get<std::string>()));
            } catch (const std::invalid_argument &e) {
                throw ConfigError(std::string("field 'families': ") + e.what());
            }
        }
    }
    if (j.contains("orders")) {
        const json &v = j.at("orders");
        if (!v.is_array()) {
            throw ConfigError("field 'orders': expected an array of integers");
        }
        c.orders.clear();
        for (const json &a : v) {
            if (!a.is_number_integer()) {
                throw ConfigError("field 'orders': expected integers");
            }
            c.orders.push_back(a.get<int>());
        }
    }
    c.validate();
    return c;
}

ScanConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

namespace {

json config_json(const ScanConfig &c) {
    json families = json::array();
    for (Family f : c.families) {
        families.push_back(to_string(f));
    }
    return json{{"beta_hz", c.beta_hz},
                {"j_hz", c.j_hz},
                {"tau0_s", c.tau0_s},
                {"n_bath", c.n_bath},
                {"realizations", c.realizations},
                {"master_seed", c.master_seed},
                {"families", families},
                {"orders", c.orders},
                {"max_class_samples", c.max_class_samples},
                {"paired", c.paired},
                {"convergence_policy", to_string(c.convergence)},
                {"compute_epg", c.compute_epg}};
}

}  // namespace

std::string config_to_json(const ScanConfig &config) {
    return config_json(config).dump(2);
}

std::uint64_t realization_seed(const ScanConfig &config, Family family, int order, int index) {
    if (config.paired) {
        return stable_hash(config.master_seed, static_cast<std::uint64_t>(index));
    }
    return stable_hash(config.master_seed, static_cast<std::uint64_t>(family), static_cast<std::uint64_t>(order),
                       static_cast<std::uint64_t>(index));
}

ProjectionString family_sequence(Family family, int alpha) {
    switch (family) {
        case Family::cdd:
            return cdd(alpha);
        case Family::owdd_h:
            return owdd_h(alpha);
        case Family::owdd_l:
            return owdd_l(alpha);
        case Family::owdd_class_envelope:
            break;
    }
    throw std::invalid_argument("the class envelope has no single representative sequence");
}

Realization draw_realization(const ScanConfig &config, std::uint64_t seed) {
    Rng rng(seed);
    Realization r;
    for (int attempt = 0;; attempt++) {
        try {
            r.model = sample_bath(config.n_bath, config.beta_hz, config.j_hz, rng);
            break;
        } catch (const DegenerateDraw &) {
            if (attempt > 16) {
                throw;
            }
        }
    }
    const Real cos_theta = 1 - 2 * static_cast<Real>(uniform01(rng));
    const Real phi = 2 * std::numbers::pi_v<Real> * static_cast<Real>(uniform01(rng));
    r.psi(0) = std::sqrt((1 + cos_theta) / 2);
    r.psi(1) = std::polar(std::sqrt((1 - cos_theta) / 2), phi);
    r.bath_bits.resize(static_cast<std::size_t>(config.n_bath));
    for (int &bit : r.bath_bits) {
        bit = uniform01(rng) < 0.5 ? 0 : 1;
    }
    return r;
}

namespace {

/// A drawn realization with its spectrum and slot propagator.
struct Prepared {
    Realization realization;
    HamiltonianSpectrum spectrum;
    Matrix slot;
    Vector psi0;

    Prepared(const ScanConfig &config, std::uint64_t seed)
        : realization(draw_realization(config, seed)),
          spectrum(realization.model.hamiltonian()),
          slot(spectrum.propagator(static_cast<Real>(config.tau0_s))),
          psi0(product_state(realization.psi, realization.bath_bits)) {
    }
};

RealizationSample evaluate(const ScanConfig &config, const Prepared &p, const PulseSchedule &sched) {
    RealizationSample out;
    const Vector psi = apply_schedule(p.slot, sched, p.psi0);
    const Matrix2 rho = reduced_state(psi);
    out.fidelity = static_cast<double>(fidelity(rho, p.realization.psi));
    out.loss = static_cast<double>(fidelity_loss(rho, p.realization.psi));
    out.converged = p.spectrum.norm() * static_cast<Real>(sched.duration()) < std::numbers::pi_v<Real>;
    out.excluded = !out.converged && config.convergence == ConvergencePolicy::exclude;
    if (out.converged && config.compute_epg) {
        out.epg = static_cast<double>(exact_error_action(p.spectrum, sched).epg());
    }
    return out;
}

}  // namespace

RealizationSample run_realization(const ScanConfig &config, const ProjectionString &s, std::uint64_t seed) {
    const Prepared p(config, seed);
    return evaluate(config, p, compile(s, config.tau0_s));
}

RealizationSample run_realization(const ScanConfig &config, Family family, int order, int index) {
    return run_realization(config, family_sequence(family, order), realization_seed(config, family, order, index));
}

RealizationSample run_free_evolution(const ScanConfig &config, std::uint64_t n_slots, std::uint64_t seed) {
    const Prepared p(config, seed);
    const auto sched =
        PulseSchedule::from_labels(config.tau0_s, std::vector<Pauli>(static_cast<std::size_t>(n_slots), Pauli::I));
    return evaluate(config, p, sched);
}

std::vector<ProjectionString> class_members(int alpha, int cap) {
    if (cap < 2) {
        throw std::invalid_argument("class sample cap must be >= 2");
    }
    const auto all = owdd_enumerate(alpha);
    if (all.size() <= static_cast<std::size_t>(cap)) {
        return all;
    }
    std::set<ProjectionString> picked{owdd_h(alpha), owdd_l(alpha)};
    const std::size_t want = static_cast<std::size_t>(cap);
    for (std::size_t k = 0; picked.size() < want && k < all.size(); k++) {
        // Evenly strided walk; the stride is coprime-agnostic since duplicates are skipped.
        picked.insert(all[(k * all.size()) / want % all.size()]);
    }
    for (std::size_t k = 0; picked.size() < want && k < all.size(); k++) {
        picked.insert(all[k]);
    }
    std::vector<ProjectionString> out;
    for (const auto &s : all) {
        if (picked.count(s)) {
            out.push_back(s);
        }
    }
    return out;
}

namespace {

struct Entry {
    Family family;
    int order;
    std::vector<ProjectionString> members;
    std::vector<PulseSchedule> schedules;
    /// samples[member][index]
    std::vector<std::vector<RealizationSample>> samples;
};

struct Moments {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double std = std::numeric_limits<double>::quiet_NaN();
    double min = std::numeric_limits<double>::quiet_NaN();
    double max = std::numeric_limits<double>::quiet_NaN();
};

Moments moments(const std::vector<double> &v) {
    Moments m;
    if (v.empty()) {
        return m;
    }
    double sum = 0;
    for (double x : v) {
        sum += x;
    }
    m.mean = sum / static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) {
        ss += (x - m.mean) * (x - m.mean);
    }
    m.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    m.min = *lo;
    m.max = *hi;
    return m;
}

int worker_count(const ScanConfig &config) {
    int n = config.threads;
    if (n <= 0) {
        n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }
    return std::min(n, config.realizations);
}

}  // namespace

ScanResult run_scan_detailed(const ScanConfig &config) {
    config.validate();
    std::vector<Entry> entries;
    for (Family f : config.families) {
        for (int alpha : config.orders) {
            Entry e{f, alpha, {}, {}, {}};
            if (f == Family::owdd_class_envelope) {
                e.members = class_members(alpha, config.max_class_samples);
            } else {
                e.members = {family_sequence(f, alpha)};
            }
            for (const auto &s : e.members) {
                e.schedules.push_back(compile(s, config.tau0_s));
            }
            e.samples.assign(e.members.size(), std::vector<RealizationSample>(config.realizations));
            entries.push_back(std::move(e));
        }
    }

    // Each index is computed by exactly one worker and written to its own slot,
    // so results do not depend on scheduling.
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&]() {
        try {
            for (int i = next++; i < config.realizations; i = next++) {
                std::optional<std::uint64_t> cached_seed;
                std::optional<Prepared> prepared;
                for (auto &e : entries) {
                    const std::uint64_t seed = realization_seed(config, e.family, e.order, i);
                    if (cached_seed != seed) {
                        prepared.emplace(config, seed);
                        cached_seed = seed;
                    }
                    for (std::size_t m = 0; m < e.members.size(); m++) {
                        e.samples[m][static_cast<std::size_t>(i)] = evaluate(config, *prepared, e.schedules[m]);
                    }
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next = config.realizations;
        }
    };
    const int workers = worker_count(config);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; w++) {
            pool.emplace_back(work);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    ScanResult result;
    for (const auto &e : entries) {
        ScanRecord r;
        r.family = to_string(e.family);
        r.order = e.order;
        r.n_slots = e.schedules.front().n_slots();
        r.duration_s = e.schedules.front().duration();
        for (int i = 0; i < config.realizations; i++) {
            (e.samples.front()[static_cast<std::size_t>(i)].excluded ? r.n_excluded : r.n_ok)++;
        }
        std::vector<double> all_losses;
        std::vector<double> member_means;
        for (std::size_t m = 0; m < e.members.size(); m++) {
            std::vector<double> losses;
            for (int i = 0; i < config.realizations; i++) {
                const auto &s = e.samples[m][static_cast<std::size_t>(i)];
                if (!s.excluded) {
                    losses.push_back(s.loss);
                }
                if (s.epg) {
                    result.samples.push_back({e.members[m].str(), i, s.fidelity, s.epg});
                }
            }
            all_losses.insert(all_losses.end(), losses.begin(), losses.end());
            member_means.push_back(moments(losses).mean);
        }
        const Moments overall = moments(all_losses);
        r.mean_loss = overall.mean;
        r.std_loss = overall.std;
        if (e.family == Family::owdd_class_envelope) {
            const Moments spread = moments(member_means);
            r.min_loss = spread.min;
            r.max_loss = spread.max;
            r.sequence = "owdd_class(" + std::to_string(e.members.size()) + "/" +
                         std::to_string(owdd_class(e.order).size) + ")";
        } else {
            r.min_loss = overall.min;
            r.max_loss = overall.max;
            r.sequence = e.members.front().str();
        }
        result.records.push_back(std::move(r));
    }
    return result;
}

std::vector<ScanRecord> run_scan(const ScanConfig &config) {
    return run_scan_detailed(config).records;
}

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json number_or_null(double v) {
    return std::isnan(v) ? json(nullptr) : json(v);
}

double number_from(const json &v) {
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

}  // namespace

std::string records_to_csv(const std::vector<ScanRecord> &records) {
    std::string out =
        "family,order,sequence,n_slots,duration_s,mean_loss,std_loss,min_loss,max_loss,n_ok,n_excluded\n";
    for (const auto &r : records) {
        out += r.family + "," + std::to_string(r.order) + "," + r.sequence + "," + std::to_string(r.n_slots) + "," +
               format_double(r.duration_s) + "," + format_double(r.mean_loss) + "," + format_double(r.std_loss) +
               "," + format_double(r.min_loss) + "," + format_double(r.max_loss) + "," + std::to_string(r.n_ok) +
               "," + std::to_string(r.n_excluded) + "\n";
    }
    return out;
}

std::string records_to_json(const std::vector<ScanRecord> &records, const ScanConfig *config) {
    json rows = json::array();
    for (const auto &r : records) {
        rows.push_back({{"family", r.family},
                        {"order", r.order},
                        {"sequence", r.sequence},
                        {"n_slots", r.n_slots},
                        {"duration_s", r.duration_s},
                        {"mean_loss", number_or_null(r.mean_loss)},
                        {"std_loss", number_or_null(r.std_loss)},
                        {"min_loss", number_or_null(r.min_loss)},
                        {"max_loss", number_or_null(r.max_loss)},
                        {"n_ok", r.n_ok},
                        {"n_excluded", r.n_excluded}});
    }
    json doc{{"metadata", {{"fidelity_loss", kFidelityLossDefinition}, {"units", kUnitsConvention}}},
             {"records", rows}};
    if (config) {
        doc["config"] = config_json(*config);
    }
    return doc.dump(2);
}

std::vector<ScanRecord> records_from_json(const std::string &text) {
    const json doc = json::parse(text);
    std::vector<ScanRecord> out;
    for (const json &row : doc.at("records")) {
        ScanRecord r;
        r.family = row.at("family").get<std::string>();
        r.order = row.at("order").get<int>();
        r.sequence = row.at("sequence").get<std::string>();
        r.n_slots = row.at("n_slots").get<std::uint64_t>();
        r.duration_s = row.at("duration_s").get<double>();
        r.mean_loss = number_from(row.at("mean_loss"));
        r.std_loss = number_from(row.at("std_loss"));
        r.min_loss = number_from(row.at("min_loss"));
        r.max_loss = number_from(row.at("max_loss"));
        r.n_ok = row.at("n_ok").get<int>();
        r.n_excluded = row.at("n_excluded").get<int>();
        out.push_back(std::move(r));
    }
    return out;
}

void persist(const std::vector<ScanRecord> &records, const std::filesystem::path &path, OutputFormat format,
             const ScanConfig *config) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
    }
    out << (format == OutputFormat::csv ? records_to_csv(records) : records_to_json(records, config) + "\n");
    out.flush();
    if (!out) {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

}  // namespace ddkit
