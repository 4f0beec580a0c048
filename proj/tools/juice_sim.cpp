// SPDX-License-Identifier: Apache-2.0
//
// juice-amp: activity detection and channel estimation for grant-free access
// Copyright (C) 2026 The juice-amp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command-line front end: detection and NASE sweeps plus the oracle validation suites.

#include "juice/errors.hpp"
#include "juice/experiment.hpp"
#include "juice/validation.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{
    struct SweepFlags
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::optional<arma::uword> trials;
        std::string sweep;
        std::string out;
        std::string format;
        std::optional<unsigned> workers;
        std::vector<std::string> settings;
        bool paper_scale = false;
        bool no_timing = false;
    };

    void add_sweep_flags(CLI::App *cmd, SweepFlags &f)
    {
        cmd->add_option("--config", f.config, "Key-value configuration file")->check(CLI::ExistingFile);
        cmd->add_option("--seed", f.seed, "Master seed (unsigned 64-bit)");
        cmd->add_option("--trials", f.trials, "Coherence blocks per sweep point")->check(CLI::PositiveNumber);
        cmd->add_option("--sweep", f.sweep, "Sweep, e.g. tau_p=15,25,35,45 or M=4,8,16,32");
        cmd->add_option("--out", f.out, "Output path");
        cmd->add_option("--format", f.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
        cmd->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
        cmd->add_option("--set", f.settings, "Extra KEY=VALUE setting, repeatable (same keys as the config file)");
        cmd->add_flag("--paper-scale", f.paper_scale, "N = 1000, M = 32 preset; explicit flags still override");
        cmd->add_flag("--no-timing", f.no_timing, "Write wall_s = 0 so reruns compare byte for byte");
    }

    // Defaults, then the config file, then the paper preset, then explicit flags
    juice::ExperimentSpec build_spec(const SweepFlags &f)
    {
        juice::ExperimentSpec spec;
        if (!f.config.empty())
            spec = juice::load_spec_file(f.config, spec);
        if (!f.sweep.empty())
            juice::parse_sweep(spec, f.sweep);
        if (f.paper_scale)
            juice::apply_paper_scale(spec);
        for (const auto &kv : f.settings)
        {
            auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw juice::ConfigError("--set expects KEY=VALUE, got '" + kv + "'.");
            juice::apply_spec_setting(spec, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (f.seed)
            spec.seed = *f.seed;
        if (f.trials)
            spec.trials = *f.trials;
        if (!f.out.empty())
            spec.output = f.out;
        if (!f.format.empty())
            spec.format = juice::parse_output_format(f.format);
        if (f.workers)
            spec.workers = *f.workers;
        if (f.no_timing)
            spec.record_timing = false;
        spec.validate();
        return spec;
    }

    std::string command_line(int argc, char **argv)
    {
        std::string s;
        for (int i = 0; i < argc; ++i)
        {
            if (i > 0)
                s += ' ';
            s += argv[i];
        }
        return s;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"juice_sim: grant-free activity detection and channel estimation by MMV-AMP"};
    app.require_subcommand(1);

    SweepFlags detect_flags, nase_flags;
    auto *detect = app.add_subcommand("detect-sweep", "Simulated vs predicted miss-detection and false-alarm rates");
    add_sweep_flags(detect, detect_flags);
    auto *nase = app.add_subcommand("nase-sweep", "AMP vs oracle-MMSE channel estimation error");
    add_sweep_flags(nase, nase_flags);

    std::uint64_t validate_seed = 1;
    auto *validate = app.add_subcommand("validate", "Run the Jacobian and quadratic-form oracle suites");
    validate->add_option("--seed", validate_seed, "Seed for the random instances");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (validate->parsed())
            return juice::validation::run_validation(validate_seed, std::cout) ? 0 : 1;

        const bool is_detect = detect->parsed();
        juice::ExperimentSpec spec = build_spec(is_detect ? detect_flags : nase_flags);
        std::vector<juice::ResultRow> rows = is_detect ? juice::run_detection_sweep(spec) : juice::run_nase_sweep(spec);
        juice::emit_results(rows, spec.output, spec.format, spec, command_line(argc, argv));
        std::cerr << "wrote " << rows.size() << " rows to " << spec.output << "\n";
        return 0;
    }
    catch (const juice::SweepAborted &e)
    {
        std::cerr << "sweep aborted: " << e.what() << "\n";
        return 3;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
