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

#include "juice/scenario.hpp"

#include <armadillo>
#include <cstdint>
#include <span>

namespace juice
{
    // Ground truth and decisions of one coherence block
    struct TrialOutcome
    {
        arma::uvec activity;    // true gamma
        arma::uvec decided;     // gamma_hat
        arma::cx_mat effective; // true X, M x N
        arma::cx_mat estimate;  // X_hat, M x N

        arma::uvec active_set() const { return arma::find(activity); }
        void validate() const;
    };

    // Miss / false-alarm counters; additive over trials
    struct RateCounts
    {
        std::uint64_t active = 0;
        std::uint64_t missed = 0;
        std::uint64_t inactive = 0;
        std::uint64_t false_alarms = 0;

        void add(const arma::uvec &activity, const arma::uvec &decided);
        RateCounts &operator+=(const RateCounts &other);
    };

    struct RateEstimate
    {
        double p_md = 0.0;
        double p_md_se = 0.0;
        double p_fa = 0.0;
        double p_fa_se = 0.0;
        std::uint64_t active = 0;
        std::uint64_t inactive = 0;
    };

    // Pooled rates with binomial standard errors sqrt(p (1 - p) / n).
    // Throws UndefinedStatisticError when no active (or no inactive) user was observed.
    RateEstimate rates_from_counts(const RateCounts &counts);
    RateEstimate empirical_rates(std::span<const TrialOutcome> outcomes);

    // Sums of squared error and signal energy over the true active set
    struct NaseAccumulator
    {
        double error_energy = 0.0;
        double signal_energy = 0.0;
        std::uint64_t trials = 0; // trials with a nonempty active set

        void add(const arma::cx_mat &effective, const arma::cx_mat &estimate, const arma::uvec &active_set);
        NaseAccumulator &operator+=(const NaseAccumulator &other);
    };

    struct NaseResult
    {
        double ratio = 0.0;
        double db = 0.0;
    };

    double to_db(double ratio);

    // E[||X_S - X_hat_S||^2] / E[||X_S||^2], a ratio of averages
    NaseResult nase_from(const NaseAccumulator &acc);
    NaseResult nase(std::span<const TrialOutcome> outcomes);

    // Joint MMSE estimate of the active channels given the true active set S.
    // Returns M x |S|, column k belongs to user active_set(k).
    arma::cx_mat oracle_mmse(const arma::cx_mat &rx, const arma::cx_mat &pilots, const arma::uvec &active_set,
                             const CovarianceSet &covs, double noise_power);

    // Places the columns of `partial` (M x |S|) at positions `active_set` of an M x N zero matrix
    arma::cx_mat embed_columns(const arma::cx_mat &partial, const arma::uvec &active_set, arma::uword users);
}
