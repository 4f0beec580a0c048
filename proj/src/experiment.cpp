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

#include "juice/experiment.hpp"
#include "juice/detector.hpp"
#include "juice/errors.hpp"
#include "juice/metrics.hpp"
#include "juice/theory.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace
{
    // Stream tags keep the covariance, calibration and trial generators disjoint
    constexpr std::uint64_t covariance_stream = 0xC0FA000000000000ULL;
    constexpr std::uint64_t calibration_stream = 0xCA1B000000000000ULL;

    struct TrialSummary
    {
        juice::RateCounts counts;
        juice::NaseAccumulator amp;
        juice::NaseAccumulator oracle;
        bool diverged = false;
    };

    TrialSummary run_trial(const juice::SystemConfig &config, const juice::CovarianceSet &covs,
                           const juice::ExperimentSpec &spec, const arma::vec &levels, juice::Rng rng)
    {
        TrialSummary out;
        juice::GroundTruth truth = juice::draw_ground_truth(config, covs, rng);
        arma::cx_mat pilots = juice::gen_pilots(config, rng);
        arma::cx_mat rx = juice::synthesize_rx(pilots, truth.effective, config.noise_power, rng);

        juice::AmpReport report = juice::run_amp(rx, pilots, covs, config.activity, config.noise_power, spec.amp);
        if (report.diverged())
        {
            out.diverged = true;
            return out;
        }

        arma::uvec decided = juice::decide_all(report.state.pseudo_data, covs, report.state.sigma, config.activity,
                                               levels);
        out.counts.add(truth.activity, decided);

        const arma::uvec active = truth.active_set();
        out.amp.add(truth.effective, report.state.estimate, active);
        if (!active.is_empty())
        {
            arma::cx_mat oracle = juice::oracle_mmse(rx, pilots, active, covs, config.noise_power);
            out.oracle.add(truth.effective, juice::embed_columns(oracle, active, config.users), active);
        }
        return out;
    }

    // Runs all trials of one sweep point; results are stored by trial index so the merge order
    // does not depend on the number of workers.
    std::vector<TrialSummary> run_trials(const juice::SystemConfig &config, const juice::CovarianceSet &covs,
                                         const juice::ExperimentSpec &spec, std::uint64_t point)
    {
        const arma::vec levels(config.users, arma::fill::value(spec.threshold));
        std::vector<TrialSummary> results(spec.trials);
        std::atomic<arma::uword> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;

        auto worker = [&]()
        {
            for (arma::uword k = next++; k < spec.trials; k = next++)
            {
                try
                {
                    results[k] = run_trial(config, covs, spec, levels, juice::make_rng(spec.seed, point, k));
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = spec.trials;
                }
            }
        };

        const unsigned workers = std::max(1U, spec.workers);
        if (workers == 1)
            worker();
        else
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back(worker);
        }
        if (failure)
            std::rethrow_exception(failure);
        return results;
    }

    enum class SweepKind
    {
        detection,
        nase
    };

    std::vector<juice::ResultRow> run_sweep(const juice::ExperimentSpec &spec, SweepKind kind)
    {
        spec.validate();
        const double nan = std::numeric_limits<double>::quiet_NaN();
        std::vector<juice::ResultRow> rows;

        for (arma::uword value : spec.sweep_values())
        {
            const auto start = std::chrono::steady_clock::now();
            const juice::SystemConfig config = spec.config_for(value);

            juice::Rng cov_rng = juice::make_rng(spec.seed, covariance_stream, value);
            const juice::CovarianceSet covs = juice::build_covariances(config, cov_rng);

            std::vector<TrialSummary> trials = run_trials(config, covs, spec, value);

            TrialSummary total;
            arma::uword diverged = 0;
            for (const auto &t : trials)
            {
                if (t.diverged)
                {
                    ++diverged;
                    continue;
                }
                total.counts += t.counts;
                total.amp += t.amp;
                total.oracle += t.oracle;
            }
            if (double(diverged) > 0.01 * double(spec.trials))
            {
                std::ostringstream msg;
                msg << "sweep aborted at " << juice::to_string(spec.sweep) << "=" << value << ": AMP diverged in "
                    << diverged << " of " << spec.trials << " trials (limit 1%).";
                throw juice::SweepAborted(msg.str());
            }

            juice::ResultRow row;
            row.sweep = juice::to_string(spec.sweep);
            row.value = double(value);
            row.trials = spec.trials;

            juice::RateEstimate rates = juice::rates_from_counts(total.counts);
            row.p_md_sim = rates.p_md;
            row.p_md_se = rates.p_md_se;
            row.p_fa_sim = rates.p_fa;
            row.p_fa_se = rates.p_fa_se;
            row.nase_amp_db = juice::nase_from(total.amp).db;
            row.nase_oracle_db = juice::nase_from(total.oracle).db;

            row.p_md_pred = nan;
            row.p_fa_pred = nan;
            if (kind == SweepKind::detection)
            {
                juice::Rng cal_rng = juice::make_rng(spec.seed, calibration_stream, value);
                juice::SigmaCalibration cal;
                cal.amp = spec.amp;
                arma::cx_mat sigma = juice::converged_sigma(config, covs, spec.calibration_trials, cal_rng, cal);
                const arma::vec levels(config.users, arma::fill::value(spec.threshold));
                juice::DetectionPrediction pred = juice::predict_all(covs, sigma, config.activity, levels);
                row.p_md_pred = pred.mean_p_md();
                row.p_fa_pred = pred.mean_p_fa();
            }

            if (spec.record_timing)
                row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            rows.push_back(row);
        }
        return rows;
    }
}

std::string juice::to_string(SweepVariable var)
{
    switch (var)
    {
    case SweepVariable::pilot_length:
        return "tau_p";
    case SweepVariable::antennas:
        return "M";
    default:
        return "none";
    }
}

juice::SweepVariable juice::parse_sweep_variable(const std::string &name)
{
    if (name == "tau_p")
        return SweepVariable::pilot_length;
    if (name == "M")
        return SweepVariable::antennas;
    if (name == "none")
        return SweepVariable::none;
    throw ConfigError("unknown sweep variable '" + name + "' (expected tau_p, M or none).");
}

std::string juice::to_string(OutputFormat format)
{
    switch (format)
    {
    case OutputFormat::json:
        return "json";
    case OutputFormat::both:
        return "both";
    default:
        return "csv";
    }
}

juice::OutputFormat juice::parse_output_format(const std::string &name)
{
    if (name == "csv")
        return OutputFormat::csv;
    if (name == "json")
        return OutputFormat::json;
    if (name == "both")
        return OutputFormat::both;
    throw ConfigError("unknown output format '" + name + "' (expected csv, json or both).");
}

void juice::ExperimentSpec::validate() const
{
    if (trials < 1)
        throw ConfigError("trials must be at least 1.");
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ConfigError("threshold must lie in (0, 1).");
    if (calibration_trials < 1)
        throw ConfigError("calibration_trials must be at least 1.");
    if (amp.max_iterations < 1 || !(amp.tolerance >= 0.0))
        throw ConfigError("AMP needs max_iter >= 1 and tol >= 0.");
    if (sweep != SweepVariable::none && values.empty())
        throw ConfigError("sweep has no values.");
    for (arma::uword v : sweep_values())
        config_for(v).validate();
}

std::vector<arma::uword> juice::ExperimentSpec::sweep_values() const
{
    if (sweep == SweepVariable::none)
        return {0};
    for (arma::uword v : values)
        if (v < 1)
            throw ConfigError("sweep values must be positive integers.");
    return values;
}

juice::SystemConfig juice::ExperimentSpec::config_for(arma::uword value) const
{
    SystemConfig c = base;
    if (sweep == SweepVariable::pilot_length)
        c.pilot_length = value;
    else if (sweep == SweepVariable::antennas)
        c.antennas = value;
    return c;
}

void juice::apply_paper_scale(ExperimentSpec &spec)
{
    const double ratio = 1000.0 / double(spec.base.users);
    spec.base.users = 1000;
    spec.base.antennas = 32;
    spec.base.activity = 0.05;
    spec.base.noise_power = noise_power_from_snr_db(10.0);
    if (spec.sweep == SweepVariable::pilot_length)
        for (auto &v : spec.values)
            v = arma::uword(std::lround(double(v) * ratio));
    else
        spec.base.pilot_length = arma::uword(std::lround(double(spec.base.pilot_length) * ratio));
}

bool juice::operator==(const ResultRow &a, const ResultRow &b)
{
    auto same = [](double x, double y) { return (std::isnan(x) && std::isnan(y)) || x == y; };
    return a.sweep == b.sweep && same(a.value, b.value) && same(a.p_md_sim, b.p_md_sim) &&
           same(a.p_md_se, b.p_md_se) && same(a.p_fa_sim, b.p_fa_sim) && same(a.p_fa_se, b.p_fa_se) &&
           same(a.p_md_pred, b.p_md_pred) && same(a.p_fa_pred, b.p_fa_pred) &&
           same(a.nase_amp_db, b.nase_amp_db) && same(a.nase_oracle_db, b.nase_oracle_db) &&
           a.trials == b.trials && same(a.wall_s, b.wall_s);
}

std::vector<juice::ResultRow> juice::run_detection_sweep(const ExperimentSpec &spec)
{
    return run_sweep(spec, SweepKind::detection);
}

std::vector<juice::ResultRow> juice::run_nase_sweep(const ExperimentSpec &spec)
{
    return run_sweep(spec, SweepKind::nase);
}
