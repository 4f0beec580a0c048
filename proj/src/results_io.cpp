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

#include "juice/errors.hpp"
#include "juice/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

const char *const juice::results_csv_header =
    "sweep,var,p_md_sim,p_md_se,p_fa_sim,p_fa_se,p_md_pred,p_fa_pred,nase_amp_db,nase_oracle_db,trials,wall_s";

namespace
{
    // Shortest representation that parses back to the same double
    std::string format_double(double x)
    {
        if (std::isnan(x))
            return "nan";
        if (std::isinf(x))
            return x > 0 ? "inf" : "-inf";
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof(buf), x);
        return std::string(buf, res.ptr);
    }

    double parse_double(const std::string &text, const std::string &what)
    {
        if (text == "nan")
            return std::numeric_limits<double>::quiet_NaN();
        if (text == "inf")
            return std::numeric_limits<double>::infinity();
        if (text == "-inf")
            return -std::numeric_limits<double>::infinity();
        double x = 0.0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), x);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size())
            throw juice::InputError("cannot parse '" + text + "' as a number for " + what + ".");
        return x;
    }

    std::uint64_t parse_unsigned(const std::string &text, const std::string &what)
    {
        std::uint64_t x = 0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), x);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size())
            throw juice::ConfigError("cannot parse '" + text + "' as a non-negative integer for " + what + ".");
        return x;
    }

    std::vector<std::string> split(const std::string &text, char sep)
    {
        std::vector<std::string> out;
        std::string item;
        std::istringstream in(text);
        while (std::getline(in, item, sep))
            out.push_back(item);
        if (!text.empty() && text.back() == sep)
            out.emplace_back();
        return out;
    }

    std::string trim(const std::string &s)
    {
        const auto first = s.find_first_not_of(" \t\r\n");
        if (first == std::string::npos)
            return "";
        const auto last = s.find_last_not_of(" \t\r\n");
        return s.substr(first, last - first + 1);
    }

    nlohmann::json number_or_null(double x)
    {
        if (std::isfinite(x))
            return x;
        return nullptr;
    }
}

void juice::write_results_csv(const std::vector<ResultRow> &rows, std::ostream &out)
{
    out << results_csv_header << '\n';
    for (const auto &r : rows)
    {
        out << r.sweep << ',' << format_double(r.value) << ',' << format_double(r.p_md_sim) << ','
            << format_double(r.p_md_se) << ',' << format_double(r.p_fa_sim) << ',' << format_double(r.p_fa_se) << ','
            << format_double(r.p_md_pred) << ',' << format_double(r.p_fa_pred) << ','
            << format_double(r.nase_amp_db) << ',' << format_double(r.nase_oracle_db) << ',' << r.trials << ','
            << format_double(r.wall_s) << '\n';
    }
}

std::vector<juice::ResultRow> juice::read_results_csv(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading.");

    std::string line;
    if (!std::getline(in, line) || trim(line) != results_csv_header)
        throw InputError("'" + path + "' does not start with the results header.");

    std::vector<ResultRow> rows;
    while (std::getline(in, line))
    {
        if (trim(line).empty())
            continue;
        auto f = split(trim(line), ',');
        if (f.size() != 12)
            throw InputError("'" + path + "': expected 12 columns, got " + std::to_string(f.size()) + ".");
        ResultRow r;
        r.sweep = f[0];
        r.value = parse_double(f[1], "var");
        r.p_md_sim = parse_double(f[2], "p_md_sim");
        r.p_md_se = parse_double(f[3], "p_md_se");
        r.p_fa_sim = parse_double(f[4], "p_fa_sim");
        r.p_fa_se = parse_double(f[5], "p_fa_se");
        r.p_md_pred = parse_double(f[6], "p_md_pred");
        r.p_fa_pred = parse_double(f[7], "p_fa_pred");
        r.nase_amp_db = parse_double(f[8], "nase_amp_db");
        r.nase_oracle_db = parse_double(f[9], "nase_oracle_db");
        r.trials = arma::uword(parse_unsigned(f[10], "trials"));
        r.wall_s = parse_double(f[11], "wall_s");
        rows.push_back(r);
    }
    return rows;
}

std::string juice::results_json(const std::vector<ResultRow> &rows, const ExperimentSpec &spec,
                                const std::string &command)
{
    nlohmann::ordered_json doc;
    auto &prov = doc["provenance"];
    prov["command"] = command;
    prov["seed"] = spec.seed;
    prov["trials"] = spec.trials;
    prov["threshold"] = spec.threshold;
    prov["calibration_trials"] = spec.calibration_trials;
    prov["sweep"] = to_string(spec.sweep);
    prov["sweep_values"] = spec.values;
    prov["amp"] = {{"max_iter", spec.amp.max_iterations},
                   {"tol", spec.amp.tolerance},
                   {"divergence_factor", spec.amp.divergence_factor},
                   {"sigma_init", spec.amp.init == SigmaInit::pilot_scaled ? "pilot_scaled" : "unscaled"}};
    const SystemConfig &c = spec.base;
    prov["config"] = {{"users", c.users},
                      {"antennas", c.antennas},
                      {"pilot_length", c.pilot_length},
                      {"activity", c.activity},
                      {"noise_power", c.noise_power},
                      {"snr_db", snr_db_from_noise_power(c.noise_power)},
                      {"cell_radius", c.cell_radius},
                      {"guard_radius", c.guard_radius},
                      {"asd_deg", c.asd_deg},
                      {"antenna_spacing", c.antenna_spacing},
                      {"pathloss", "unit_gain"}};

    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto &r : rows)
    {
        doc["rows"].push_back({{"sweep", r.sweep},
                               {"var", r.value},
                               {"p_md_sim", number_or_null(r.p_md_sim)},
                               {"p_md_se", number_or_null(r.p_md_se)},
                               {"p_fa_sim", number_or_null(r.p_fa_sim)},
                               {"p_fa_se", number_or_null(r.p_fa_se)},
                               {"p_md_pred", number_or_null(r.p_md_pred)},
                               {"p_fa_pred", number_or_null(r.p_fa_pred)},
                               {"nase_amp_db", number_or_null(r.nase_amp_db)},
                               {"nase_oracle_db", number_or_null(r.nase_oracle_db)},
                               {"trials", r.trials},
                               {"wall_s", r.wall_s}});
    }
    return doc.dump(2) + "\n";
}

void juice::emit_results(const std::vector<ResultRow> &rows, const std::string &path, OutputFormat format,
                         const ExperimentSpec &spec, const std::string &command)
{
    if (rows.empty())
        throw InputError("emit_results: no rows to write.");

    auto open = [](const std::string &p)
    {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open '" + p + "' for writing.");
        return out;
    };

    if (format == OutputFormat::csv || format == OutputFormat::both)
    {
        std::ofstream out = open(path);
        write_results_csv(rows, out);
        if (!out)
            throw IoError("failed writing '" + path + "'.");
    }
    if (format == OutputFormat::json || format == OutputFormat::both)
    {
        const std::string json_path = format == OutputFormat::both ? path + ".json" : path;
        std::ofstream out = open(json_path);
        out << results_json(rows, spec, command);
        if (!out)
            throw IoError("failed writing '" + json_path + "'.");
    }
}

void juice::parse_sweep(ExperimentSpec &spec, const std::string &text)
{
    const auto eq = text.find('=');
    const std::string name = trim(text.substr(0, eq));
    spec.sweep = parse_sweep_variable(name);
    spec.values.clear();
    if (spec.sweep == SweepVariable::none)
        return;
    if (eq == std::string::npos)
        throw ConfigError("sweep must look like tau_p=15,25 or M=4,8.");
    for (const auto &item : split(text.substr(eq + 1), ','))
    {
        const std::uint64_t v = parse_unsigned(trim(item), "sweep value");
        if (v == 0)
            throw ConfigError("sweep values must be positive integers.");
        spec.values.push_back(arma::uword(v));
    }
    if (spec.values.empty())
        throw ConfigError("sweep has no values.");
}

void juice::apply_spec_setting(ExperimentSpec &spec, const std::string &key, const std::string &value)
{
    SystemConfig &c = spec.base;
    if (key == "users" || key == "N")
        c.users = parse_unsigned(value, key);
    else if (key == "antennas" || key == "M")
        c.antennas = parse_unsigned(value, key);
    else if (key == "pilot_length" || key == "tau_p")
        c.pilot_length = parse_unsigned(value, key);
    else if (key == "activity" || key == "epsilon")
        c.activity = parse_double(value, key);
    else if (key == "snr_db")
        c.noise_power = noise_power_from_snr_db(parse_double(value, key));
    else if (key == "noise_power")
        c.noise_power = parse_double(value, key);
    else if (key == "cell_radius")
        c.cell_radius = parse_double(value, key);
    else if (key == "guard_radius")
        c.guard_radius = parse_double(value, key);
    else if (key == "asd_deg")
        c.asd_deg = parse_double(value, key);
    else if (key == "antenna_spacing")
        c.antenna_spacing = parse_double(value, key);
    else if (key == "trials")
        spec.trials = parse_unsigned(value, key);
    else if (key == "seed")
        spec.seed = parse_unsigned(value, key);
    else if (key == "max_iter")
        spec.amp.max_iterations = parse_unsigned(value, key);
    else if (key == "tol")
        spec.amp.tolerance = parse_double(value, key);
    else if (key == "sigma_init")
    {
        if (value == "pilot_scaled")
            spec.amp.init = SigmaInit::pilot_scaled;
        else if (value == "unscaled")
            spec.amp.init = SigmaInit::unscaled;
        else
            throw ConfigError("sigma_init must be pilot_scaled or unscaled.");
    }
    else if (key == "threshold" || key == "l")
        spec.threshold = parse_double(value, key);
    else if (key == "calibration_trials")
        spec.calibration_trials = parse_unsigned(value, key);
    else if (key == "sweep")
        parse_sweep(spec, value);
    else if (key == "out")
        spec.output = value;
    else if (key == "format")
        spec.format = parse_output_format(value);
    else if (key == "workers")
        spec.workers = unsigned(parse_unsigned(value, key));
    else if (key == "record_timing")
    {
        if (value == "true" || value == "1")
            spec.record_timing = true;
        else if (value == "false" || value == "0")
            spec.record_timing = false;
        else
            throw ConfigError("record_timing must be true or false.");
    }
    else
        throw ConfigError("unknown configuration key '" + key + "'.");
}

juice::ExperimentSpec juice::load_spec_file(const std::string &path, ExperimentSpec spec)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open configuration file '" + path + "'.");

    std::string line;
    int number = 0;
    while (std::getline(in, line))
    {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(number) + ": expected 'key = value'.");
        try
        {
            apply_spec_setting(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError(path + ":" + std::to_string(number) + ": " + e.what());
        }
    }
    return spec;
}
