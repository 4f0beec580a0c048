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

#include "juice/metrics.hpp"
#include "juice/errors.hpp"
#include "juice/matrix_core.hpp"

#include <cmath>
#include <limits>

void juice::TrialOutcome::validate() const
{
    const arma::uword N = activity.n_elem;
    if (decided.n_elem != N || effective.n_cols != N || estimate.n_cols != N || effective.n_rows != estimate.n_rows)
        throw InputError("TrialOutcome: inconsistent dimensions.");
}

void juice::RateCounts::add(const arma::uvec &activity, const arma::uvec &decided)
{
    if (activity.n_elem != decided.n_elem)
        throw InputError("RateCounts: activity and decision lengths differ.");
    for (arma::uword i = 0; i < activity.n_elem; ++i)
    {
        if (activity(i))
        {
            ++active;
            missed += decided(i) ? 0 : 1;
        }
        else
        {
            ++inactive;
            false_alarms += decided(i) ? 1 : 0;
        }
    }
}

juice::RateCounts &juice::RateCounts::operator+=(const RateCounts &other)
{
    active += other.active;
    missed += other.missed;
    inactive += other.inactive;
    false_alarms += other.false_alarms;
    return *this;
}

juice::RateEstimate juice::rates_from_counts(const RateCounts &counts)
{
    if (counts.active == 0)
        throw UndefinedStatisticError("miss-detection rate is undefined: no active users observed.");
    if (counts.inactive == 0)
        throw UndefinedStatisticError("false-alarm rate is undefined: no inactive users observed.");

    RateEstimate out;
    out.active = counts.active;
    out.inactive = counts.inactive;
    out.p_md = double(counts.missed) / double(counts.active);
    out.p_fa = double(counts.false_alarms) / double(counts.inactive);
    out.p_md_se = std::sqrt(out.p_md * (1.0 - out.p_md) / double(counts.active));
    out.p_fa_se = std::sqrt(out.p_fa * (1.0 - out.p_fa) / double(counts.inactive));
    return out;
}

juice::RateEstimate juice::empirical_rates(std::span<const TrialOutcome> outcomes)
{
    if (outcomes.empty())
        throw InputError("empirical_rates: at least one trial is required.");
    RateCounts counts;
    for (const auto &o : outcomes)
    {
        o.validate();
        counts.add(o.activity, o.decided);
    }
    return rates_from_counts(counts);
}

void juice::NaseAccumulator::add(const arma::cx_mat &effective, const arma::cx_mat &estimate,
                                 const arma::uvec &active_set)
{
    if (effective.n_rows != estimate.n_rows || effective.n_cols != estimate.n_cols)
        throw InputError("NaseAccumulator: true and estimated channels differ in shape.");
    if (active_set.is_empty())
        return;
    const arma::cx_mat truth = effective.cols(active_set);
    error_energy += std::pow(arma::norm(truth - estimate.cols(active_set), "fro"), 2);
    signal_energy += std::pow(arma::norm(truth, "fro"), 2);
    ++trials;
}

juice::NaseAccumulator &juice::NaseAccumulator::operator+=(const NaseAccumulator &other)
{
    error_energy += other.error_energy;
    signal_energy += other.signal_energy;
    trials += other.trials;
    return *this;
}

double juice::to_db(double ratio)
{
    if (ratio <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(ratio);
}

juice::NaseResult juice::nase_from(const NaseAccumulator &acc)
{
    if (acc.trials == 0 || !(acc.signal_energy > 0.0))
        throw UndefinedStatisticError("NASE is undefined: the active set is empty in every trial.");
    NaseResult out;
    out.ratio = acc.error_energy / acc.signal_energy;
    out.db = to_db(out.ratio);
    return out;
}

juice::NaseResult juice::nase(std::span<const TrialOutcome> outcomes)
{
    NaseAccumulator acc;
    for (const auto &o : outcomes)
    {
        o.validate();
        acc.add(o.effective, o.estimate, o.active_set());
    }
    return nase_from(acc);
}

arma::cx_mat juice::oracle_mmse(const arma::cx_mat &rx, const arma::cx_mat &pilots, const arma::uvec &active_set,
                                const CovarianceSet &covs, double noise_power)
{
    if (active_set.is_empty())
        throw InputError("oracle_mmse: the active set must be nonempty.");
    if (rx.n_rows != pilots.n_rows || covs.size() != pilots.n_cols || covs.antennas() != rx.n_cols)
        throw InputError("oracle_mmse: dimensions disagree.");
    if (active_set.max() >= pilots.n_cols)
        throw InputError("oracle_mmse: active user index out of range.");

    const arma::uword M = rx.n_cols;
    const arma::uword S = active_set.n_elem;
    const arma::cx_mat phi = pilots.cols(active_set);
    const arma::cx_mat gram = phi.t() * phi;             // Phi_S^H Phi_S
    const arma::cx_mat matched = rx.st() * arma::conj(phi); // column k: A^H y restricted to user k

    // With P = blockdiag(R_k^{1/2}) and A^H A = gram (x) I_M, the estimate is
    //   x_hat = P (sigma^2 I + P (gram (x) I_M) P)^{-1} P A^H y
    // which only needs the (M |S|)-sized system below.
    arma::cx_mat system(M * S, M * S);
    arma::cx_vec rhs(M * S);
    for (arma::uword j = 0; j < S; ++j)
    {
        const arma::cx_mat &Pj = covs.root(active_set(j));
        rhs.subvec(j * M, j * M + M - 1) = Pj * matched.col(j);
        for (arma::uword i = 0; i < S; ++i)
        {
            const arma::cx_mat &Pi = covs.root(active_set(i));
            system.submat(i * M, j * M, i * M + M - 1, j * M + M - 1) = gram(i, j) * (Pi * Pj);
        }
    }
    system.diag() += noise_power;

    arma::cx_vec solved;
    try
    {
        solved = PsdFactor(system).solve(rhs);
    }
    catch (const SingularError &)
    {
        throw SingularError("oracle_mmse: innovation covariance is singular.");
    }

    arma::cx_mat out(M, S);
    for (arma::uword k = 0; k < S; ++k)
        out.col(k) = covs.root(active_set(k)) * solved.subvec(k * M, k * M + M - 1);
    return out;
}

arma::cx_mat juice::embed_columns(const arma::cx_mat &partial, const arma::uvec &active_set, arma::uword users)
{
    if (partial.n_cols != active_set.n_elem)
        throw InputError("embed_columns: column count does not match the active set.");
    arma::cx_mat out(partial.n_rows, users, arma::fill::zeros);
    for (arma::uword k = 0; k < active_set.n_elem; ++k)
        out.col(active_set(k)) = partial.col(k);
    return out;
}
