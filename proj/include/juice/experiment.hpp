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

#pragma once

#include "juice/amp.hpp"
#include "juice/scenario.hpp"

#include <armadillo>
#include <cstdint>
#include <string>
#include <vector>

namespace juice
{
    enum class SweepVariable
    {
        none,
        pilot_length, // "tau_p"
        antennas      // "M"
    };

    enum class OutputFormat
    {
        csv,
        json,
        both // CSV at the output path plus a JSON twin at <path>.json
    };

    std::string to_string(SweepVariable var);
    SweepVariable parse_sweep_variable(const std::string &name);
    std::string to_string(OutputFormat format);
    OutputFormat parse_output_format(const std::string &name);

    struct ExperimentSpec
    {
        SystemConfig base;
        SweepVariable sweep = SweepVariable::pilot_length;
        std::vector<arma::uword> values = {15, 25, 35, 45};
        arma::uword trials = 2000;
        std::uint64_t seed = 1;
        AmpOptions amp;
        double threshold = 0.5;            // l, shared by all users
        arma::uword calibration_trials = 100;
        std::string output = "results.csv";
        OutputFormat format = OutputFormat::csv;
        unsigned workers = 1;
        bool record_timing = true;         // false writes wall_s = 0 so files compare byte for byte

        void validate() const;

        // Values iterated by the sweep; a single 0 when sweep == none
        std::vector<arma::uword> sweep_values() const;

        // Base configuration with the sweep variable set to `value`
        SystemConfig config_for(arma::uword value) const;
    };

    // N = 1000, M = 32, eps = 0.05, SNR = 10 dB with the pilot sweep scaled to N = 1000
    void apply_paper_scale(ExperimentSpec &spec);

    struct ResultRow
    {
        std::string sweep;           // sweep variable name
        double value = 0.0;          // sweep value
        double p_md_sim = 0.0;
        double p_md_se = 0.0;
        double p_fa_sim = 0.0;
        double p_fa_se = 0.0;
        double p_md_pred = 0.0;      // NaN when no prediction was computed
        double p_fa_pred = 0.0;
        double nase_amp_db = 0.0;
        double nase_oracle_db = 0.0;
        arma::uword trials = 0;
        double wall_s = 0.0;
    };

    bool operator==(const ResultRow &a, const ResultRow &b); // NaN fields compare equal to NaN

    // Detection sweep: simulated and predicted rates plus paired NASE per sweep value
    std::vector<ResultRow> run_detection_sweep(const ExperimentSpec &spec);

    // NASE sweep: AMP and oracle-MMSE NASE on identical trials; prediction columns are NaN
    std::vector<ResultRow> run_nase_sweep(const ExperimentSpec &spec);

    // CSV header, bit exact
    extern const char *const results_csv_header;

    void write_results_csv(const std::vector<ResultRow> &rows, std::ostream &out);
    std::vector<ResultRow> read_results_csv(const std::string &path);
    std::string results_json(const std::vector<ResultRow> &rows, const ExperimentSpec &spec, const std::string &command);

    // Writes according to spec.format; throws IoError when the path cannot be written
    void emit_results(const std::vector<ResultRow> &rows, const std::string &path, OutputFormat format,
                      const ExperimentSpec &spec, const std::string &command = "");

    // Flat "key = value" configuration file; '#' starts a comment
    ExperimentSpec load_spec_file(const std::string &path, ExperimentSpec spec = {});
    void apply_spec_setting(ExperimentSpec &spec, const std::string &key, const std::string &value);
    void parse_sweep(ExperimentSpec &spec, const std::string &text); // "tau_p=15,25,35,45"
}
