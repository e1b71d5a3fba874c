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

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ddkit/bounds.h"
#include "ddkit/experiments.h"
#include "ddkit/random.h"
#include "ddkit/sequence.h"
#include "ddkit/serialize.h"
#include "json.hpp"

namespace {

using namespace ddkit;

enum ExitCode { kOk = 0, kInternal = 1, kConstraint = 2, kRegime = 3, kConfig = 4 };

PaleyVector parse_paley(const std::string &text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        parts.push_back(item);
    }
    if (parts.size() != 3) {
        throw std::invalid_argument("--paley expects three comma-separated integers nx,ny,nz");
    }
    PaleyVector v;
    for (int i = 0; i < 3; i++) {
        v.n[i] = PaleyOrder::parse(parts[i]);
    }
    return v;
}

/// The word named by exactly one of --cpdd / --paley.
ProjectionString resolve_word(const std::string &cpdd, const std::string &paley) {
    if (!cpdd.empty() == !paley.empty()) {
        throw CLI::ValidationError("exactly one of --cpdd and --paley is required");
    }
    if (!cpdd.empty()) {
        return ProjectionString::parse(cpdd);
    }
    return gwdd_to_cpdd(parse_paley(paley));
}

void write_text(const std::string &path, const std::string &text) {
    if (path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << text << "\n";
    if (!out) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

int threads_from_env() {
    if (const char *env = std::getenv("DDKIT_THREADS")) {
        try {
            return std::max(0, std::stoi(env));
        } catch (const std::exception &) {
            std::cerr << "ddkit: ignoring DDKIT_THREADS='" << env << "'\n";
        }
    }
    return 0;
}

struct Options {
    std::string cpdd, paley, out, format = "json", mode = "sum", config_path;
    double tau0 = 1e-7, beta = 0, j = 0, regime_ratio = 10.0;
    int order = 1, n_bath = 3, realizations = 1, threads = -1;
    std::uint64_t seed = 0;
    bool list = false;
};

int run(int argc, char **argv) {
    CLI::App app{"Dynamical-decoupling sequence construction, bounds and simulation."};
    app.name("ddkit");
    app.require_subcommand(1);
    Options o;

    auto add_word = [&](CLI::App *cmd) {
        cmd->add_option("--cpdd", o.cpdd, "projection word, innermost letter first (e.g. xyz)");
        cmd->add_option("--paley", o.paley, "Paley orders nx,ny,nz");
    };

    auto *construct = app.add_subcommand("construct", "compile a sequence into a pulse schedule");
    add_word(construct);
    construct->add_option("--tau0", o.tau0, "slot duration in seconds")->check(CLI::PositiveNumber);
    construct->add_option("--out", o.out, "schedule file ('-' for standard output)");
    construct->add_option("--format", o.format, "schedule file format")->check(CLI::IsMember({"json"}));

    auto *convert = app.add_subcommand("convert", "translate between a projection word and Paley orders");
    add_word(convert);

    auto *co = app.add_subcommand("co", "print the cancellation order");
    add_word(co);

    auto *owdd = app.add_subcommand("owdd", "describe the optimal Walsh class of a given order");
    owdd->add_option("--order", o.order, "cancellation order")->required()->check(CLI::Range(1, 12));
    owdd->add_flag("--list", o.list, "print every member, one per line");

    auto *bound = app.add_subcommand("bound", "leading-order EPG bound for a projection word");
    bound->add_option("--cpdd", o.cpdd, "projection word")->required();
    bound->add_option("--beta", o.beta, "|B_0| in 1/s")->required()->check(CLI::NonNegativeNumber);
    bound->add_option("--j", o.j, "max |B_u| in 1/s")->required()->check(CLI::NonNegativeNumber);
    bound->add_option("--tau0", o.tau0, "slot duration in seconds")->check(CLI::PositiveNumber);
    bound->add_option("--mode", o.mode, "sum or dominant")->check(CLI::IsMember({"sum", "dominant"}));
    bound->add_option("--regime-ratio", o.regime_ratio, "minimum beta/J separation")->check(CLI::PositiveNumber);

    auto *simulate = app.add_subcommand("simulate", "simulate a sequence on random spin baths");
    add_word(simulate);
    simulate->add_option("--beta", o.beta, "|B_0| in 1/s")->required()->check(CLI::NonNegativeNumber);
    simulate->add_option("--j", o.j, "max |B_u| in 1/s")->required()->check(CLI::NonNegativeNumber);
    simulate->add_option("--tau0", o.tau0, "slot duration in seconds")->check(CLI::PositiveNumber);
    simulate->add_option("--n-bath", o.n_bath, "bath spins")->check(CLI::Range(2, 6));
    simulate->add_option("--realizations", o.realizations, "number of draws")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", o.seed, "master seed");

    auto *scan = app.add_subcommand("scan", "run a fidelity-loss scan from a config file");
    scan->add_option("--config", o.config_path, "JSON config")->required();
    scan->add_option("--out", o.out, "output file")->required();
    scan->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    scan->add_option("--threads", o.threads, "worker threads (0 = all cores); overrides DDKIT_THREADS");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInternal;
    }

    if (construct->parsed()) {
        const ProjectionString s = resolve_word(o.cpdd, o.paley);
        if (!o.paley.empty()) {
            check_one_digit_constraint(parse_paley(o.paley));
        }
        const PulseSchedule sched = compile(s, o.tau0);
        std::ostringstream summary;
        summary << "N_T=" << sched.n_slots() << " N=" << pulse_count(sched) << " CO=" << cancellation_order(s);
        if (!o.out.empty()) {
            write_text(o.out, schedule_to_json(sched));
        }
        (o.out == "-" ? std::cerr : std::cout) << summary.str() << "\n";
    } else if (convert->parsed()) {
        if (!o.cpdd.empty() && o.paley.empty()) {
            std::cout << paley_to_json(cpdd_to_gwdd(ProjectionString::parse(o.cpdd))) << "\n";
        } else {
            resolve_word(o.cpdd, o.paley);
            const PaleyVector v = parse_paley(o.paley);
            check_one_digit_constraint(v);
            std::cout << gwdd_to_cpdd(v).str() << "\n";
        }
    } else if (co->parsed()) {
        const ProjectionString s = resolve_word(o.cpdd, o.paley);
        if (!o.paley.empty()) {
            check_one_digit_constraint(parse_paley(o.paley));
        }
        std::cout << cancellation_order(s) << "\n";
    } else if (owdd->parsed()) {
        if (o.list) {
            OwddEnumerator it(o.order);
            while (auto s = it.next()) {
                std::cout << s->str() << "\n";
            }
        } else {
            const OwddClass c = owdd_class(o.order);
            nlohmann::json doc{{"order", c.order},
                               {"parity_bit", c.parity_bit},
                               {"axis_counts", c.axis_counts},
                               {"length", c.length},
                               {"n_slots", c.n_slots},
                               {"class_size", c.size},
                               {"owdd_h", owdd_h(o.order).str()},
                               {"owdd_l", owdd_l(o.order).str()}};
            std::cout << doc.dump(2) << "\n";
        }
    } else if (bound->parsed()) {
        const EpgBound b = epg_bound(ProjectionString::parse(o.cpdd), o.tau0, o.beta, o.j,
                                     bound_mode_from_string(o.mode), o.regime_ratio);
        std::cout << bound_to_json(b) << "\n";
    } else if (simulate->parsed()) {
        const ProjectionString s = resolve_word(o.cpdd, o.paley);
        ScanConfig config;
        config.beta_hz = o.beta;
        config.j_hz = o.j;
        config.tau0_s = o.tau0;
        config.n_bath = o.n_bath;
        config.realizations = o.realizations;
        config.master_seed = o.seed;
        config.validate();
        nlohmann::json rows = nlohmann::json::array();
        double total = 0;
        for (int i = 0; i < o.realizations; i++) {
            const auto sample = run_realization(config, s, stable_hash(o.seed, static_cast<std::uint64_t>(i)));
            total += sample.loss;
            nlohmann::json row{{"index", i}, {"fidelity", sample.fidelity}, {"loss", sample.loss},
                               {"converged", sample.converged}};
            row["epg"] = sample.epg ? nlohmann::json(*sample.epg) : nlohmann::json(nullptr);
            rows.push_back(row);
        }
        const PulseSchedule sched = compile(s, o.tau0);
        nlohmann::json doc{{"string", s.str()},
                           {"n_slots", sched.n_slots()},
                           {"duration_s", sched.duration()},
                           {"mean_loss", total / o.realizations},
                           {"fidelity_loss", kFidelityLossDefinition},
                           {"units", kUnitsConvention},
                           {"realizations", rows}};
        std::cout << doc.dump(2) << "\n";
    } else if (scan->parsed()) {
        ScanConfig config = load_config(o.config_path);
        if (o.threads >= 0) {
            config.threads = o.threads;
        } else if (config.threads == 0) {
            config.threads = threads_from_env();
        }
        OutputFormat format = OutputFormat::csv;
        if (scan->count("--format") ? o.format == "json" : o.out.ends_with(".json")) {
            format = OutputFormat::json;
        }
        std::cerr << "ddkit: scanning " << config.families.size() << " families x " << config.orders.size()
                  << " orders x " << config.realizations << " realizations\n";
        const auto records = run_scan(config);
        persist(records, o.out, format, &config);
        std::cerr << "ddkit: wrote " << records.size() << " records to " << o.out << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    try {
        return run(argc, argv);
    } catch (const ddkit::ConstraintViolation &e) {
        std::cerr << "ddkit: constraint violation at bit " << e.bit() << ": " << e.what() << "\n";
        return kConstraint;
    } catch (const ddkit::RegimeError &e) {
        std::cerr << "ddkit: regime error: " << e.what() << "\n";
        return kRegime;
    } catch (const ddkit::ConfigError &e) {
        std::cerr << "ddkit: config error: " << e.what() << "\n";
        return kConfig;
    } catch (const CLI::Error &e) {
        std::cerr << "ddkit: " << e.what() << "\n";
        return kInternal;
    } catch (const std::exception &e) {
        std::cerr << "ddkit: error: " << e.what() << "\n";
        return kInternal;
    }
}
