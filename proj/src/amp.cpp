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

#include "juice/amp.hpp"
#include "juice/errors.hpp"
#include "juice/matrix_core.hpp"

#include <algorithm>
#include <cmath>

namespace
{
    constexpr double exponent_limit = 500.0;

    // Noise covariance with its inverse; shared by all users of one iteration
    struct SigmaContext
    {
        explicit SigmaContext(const arma::cx_mat &S) : sigma(juice::hermitian_part(S))
        {
            try
            {
                logdet = juice::invert_psd(sigma, inverse);
            }
            catch (const juice::SingularError &)
            {
                throw juice::StateError("state-evolution covariance is not positive definite.");
            }
        }

        arma::cx_mat sigma;
        arma::cx_mat inverse;
        double logdet = 0.0;
    };

    // Per-user quantities; buffers are reused across users to keep the hot loop allocation free
    struct UserTerms
    {
        double psi = 0.0;
        double u = 0.0;                // log|R + Sigma| - log|Sigma|
        double w = 0.0;                // theta^H Xi theta
        arma::cx_vec shrunk;           // q = R (R + Sigma)^{-1} theta
        arma::cx_vec xi_theta;         // Xi theta
        arma::cx_vec k_theta;          // (R + Sigma)^{-1} theta
        arma::cx_mat combined;         // R + Sigma
        arma::cx_mat combined_inverse; // (R + Sigma)^{-1}
    };

    double posterior_from_terms(double u, double w, double activity)
    {
        if (!(activity >= 0.0 && activity <= 1.0))
            throw juice::InputError("activity probability must lie in [0, 1].");
        double e = std::clamp(u - w, -exponent_limit, exponent_limit);
        return 1.0 / (1.0 + ((1.0 - activity) / activity) * std::exp(e));
    }

    void evaluate_user(const arma::cx_vec &theta, const arma::cx_mat &R, const SigmaContext &ctx, double activity,
                       UserTerms &t)
    {
        t.combined = ctx.sigma + R;
        t.u = juice::invert_psd(t.combined, t.combined_inverse) - ctx.logdet;
        t.k_theta = t.combined_inverse * theta;
        t.xi_theta = ctx.inverse * theta - t.k_theta;
        t.w = std::max(0.0, std::real(arma::cdot(theta, t.xi_theta)));
        t.psi = posterior_from_terms(t.u, t.w, activity);
        // R (R + Sigma)^{-1} = I - Sigma (R + Sigma)^{-1}
        t.shrunk = theta - ctx.sigma * t.k_theta;
    }

    UserTerms evaluate_user(const arma::cx_vec &theta, const arma::cx_mat &R, const SigmaContext &ctx, double activity)
    {
        UserTerms t;
        evaluate_user(theta, R, ctx, activity, t);
        return t;
    }

    void require_user_shapes(const arma::cx_vec &theta, const arma::cx_mat &R, const arma::cx_mat &sigma)
    {
        juice::require_square_finite(R, "covariance");
        juice::require_square_finite(sigma, "Sigma");
        if (R.n_rows != sigma.n_rows || theta.n_elem != R.n_rows)
            throw juice::InputError("pseudo-data, covariance and Sigma dimensions disagree.");
    }

    // Everything one AMP iteration needs from the per-user denoisers
    struct IterationTerms
    {
        arma::cx_mat estimate;      // M x N
        arma::vec psi;              // N
        arma::cx_mat jacobian_sum;  // sum_i J_i
        arma::cx_mat next_sigma;    // state-evolution update
    };

    IterationTerms iterate_users(const arma::cx_mat &theta, const juice::CovarianceSet &covs,
                                 const SigmaContext &ctx, double activity, double noise_power,
                                 arma::uword pilot_length)
    {
        const arma::uword M = ctx.sigma.n_rows;
        const arma::uword N = theta.n_cols;
        if (covs.size() != N || covs.antennas() != M || theta.n_rows != M)
            throw juice::InputError("pseudo-data and covariance set dimensions disagree.");

        IterationTerms out;
        out.estimate.set_size(M, N);
        out.psi.set_size(N);

        arma::cx_mat weighted_inverse(M, M, arma::fill::zeros); // sum_i psi_i (R_i + Sigma)^{-1}
        arma::cx_mat jac_left(M, N), jac_right(M, N);           // rank-one Jacobian factors
        arma::cx_mat cov_factor(M, N);                          // sqrt(psi - psi^2) q_i
        double psi_sum = 0.0;

        // Sequential over users in index order, so sums are reproducible bit for bit
        UserTerms t;
        arma::cx_vec theta_i(M);
        for (arma::uword i = 0; i < N; ++i)
        {
            theta_i = theta.col(i);
            evaluate_user(theta_i, covs[i], ctx, activity, t);
            const double psi = t.psi;
            const double var = psi - psi * psi;

            out.psi(i) = psi;
            out.estimate.col(i) = psi * t.shrunk;
            psi_sum += psi;
            weighted_inverse += psi * t.combined_inverse;
            jac_left.col(i) = var * t.shrunk;
            jac_right.col(i) = t.xi_theta;
            cov_factor.col(i) = std::sqrt(std::max(var, 0.0)) * t.shrunk;
        }

        const arma::cx_mat &S = ctx.sigma;
        arma::cx_mat S_weighted = S * weighted_inverse;

        // sum_i psi_i A_i = psi_sum I - Sigma sum_i psi_i (R_i + Sigma)^{-1}
        out.jacobian_sum = psi_sum * arma::eye<arma::cx_mat>(M, M) - S_weighted + jac_left * jac_right.t();

        // Posterior covariance of an active user: Sigma (R_i + Sigma)^{-1} R_i = Sigma - Sigma (R_i + Sigma)^{-1} Sigma.
        // The product is Hermitian PSD, unlike Sigma R_i (R_i + Sigma)^{-1}, whose Hermitian part can be indefinite.
        arma::cx_mat posterior_sum = psi_sum * S - S_weighted * S + cov_factor * cov_factor.t();
        out.next_sigma = noise_power * arma::eye<arma::cx_mat>(M, M) + posterior_sum / double(pilot_length);
        out.next_sigma = juice::hermitian_part(out.next_sigma);
        return out;
    }
}

arma::cx_mat juice::pseudo_data(const arma::cx_mat &residual, const arma::cx_mat &pilots, const arma::cx_mat &estimate)
{
    if (residual.n_rows != pilots.n_rows || estimate.n_cols != pilots.n_cols || estimate.n_rows != residual.n_cols)
        throw InputError("pseudo_data: residual, pilots and estimate dimensions disagree.");
    return residual.st() * arma::conj(pilots) + estimate;
}

double juice::log_det_ratio(const arma::cx_mat &R, const arma::cx_mat &sigma)
{
    if (R.n_rows != sigma.n_rows)
        throw InputError("log_det_ratio: dimensions disagree.");
    SigmaContext ctx(sigma);
    return PsdFactor(ctx.sigma + hermitian_part(R)).logdet() - ctx.logdet;
}

double juice::activity_statistic(const arma::cx_vec &theta, const arma::cx_mat &R, const arma::cx_mat &sigma)
{
    require_user_shapes(theta, R, sigma);
    SigmaContext ctx(sigma);
    PsdFactor combined(ctx.sigma + hermitian_part(R));
    const double sigma_quad = std::real(arma::cdot(theta, ctx.inverse * theta));
    return std::max(0.0, sigma_quad - combined.inverse_quadratic(theta));
}

double juice::activity_posterior(const arma::cx_vec &theta, const arma::cx_mat &R, const arma::cx_mat &sigma,
                                 double activity)
{
    require_user_shapes(theta, R, sigma);
    return evaluate_user(theta, hermitian_part(R), SigmaContext(sigma), activity).psi;
}

arma::cx_vec juice::denoise(const arma::cx_vec &theta, const arma::cx_mat &R, const arma::cx_mat &sigma,
                            double activity)
{
    require_user_shapes(theta, R, sigma);
    UserTerms t = evaluate_user(theta, hermitian_part(R), SigmaContext(sigma), activity);
    return t.psi * t.shrunk;
}

arma::cx_mat juice::denoiser_jacobian(const arma::cx_vec &theta, const arma::cx_mat &R, const arma::cx_mat &sigma,
                                      double activity)
{
    require_user_shapes(theta, R, sigma);
    SigmaContext ctx(sigma);
    UserTerms t = evaluate_user(theta, hermitian_part(R), ctx, activity);
    const arma::uword M = theta.n_elem;
    arma::cx_mat A = arma::eye<arma::cx_mat>(M, M) - ctx.sigma * t.combined_inverse;
    return t.psi * A + (t.psi * (1.0 - t.psi)) * t.shrunk * t.xi_theta.t();
}

arma::cx_mat juice::residual_update(const arma::cx_mat &rx, const arma::cx_mat &pilots,
                                    const arma::cx_mat &next_estimate, const arma::cx_mat &previous_residual,
                                    const arma::cx_mat &jacobian_sum)
{
    if (rx.n_rows != pilots.n_rows || next_estimate.n_cols != pilots.n_cols || next_estimate.n_rows != rx.n_cols ||
        previous_residual.n_rows != rx.n_rows || previous_residual.n_cols != rx.n_cols ||
        jacobian_sum.n_rows != rx.n_cols || jacobian_sum.n_cols != rx.n_cols)
        throw InputError("residual_update: dimensions disagree.");

    const double tau = double(pilots.n_rows);
    return rx - pilots * next_estimate.st() + (previous_residual * jacobian_sum.st()) / tau;
}

arma::cx_mat juice::se_init(const CovarianceSet &covs, double activity, double noise_power, arma::uword pilot_length,
                            SigmaInit init)
{
    if (covs.size() == 0)
        throw InputError("se_init: empty covariance set.");
    if (pilot_length < 1)
        throw InputError("se_init: pilot length must be positive.");
    const arma::uword M = covs.antennas();
    double scale = activity;
    if (init == SigmaInit::pilot_scaled)
        scale /= double(pilot_length);
    return hermitian_part(noise_power * arma::eye<arma::cx_mat>(M, M) + scale * covs.sum());
}

arma::cx_mat juice::se_step(const arma::cx_mat &sigma, const arma::cx_mat &theta, const CovarianceSet &covs,
                            double activity, double noise_power, arma::uword pilot_length)
{
    if (pilot_length < 1)
        throw InputError("se_step: pilot length must be positive.");
    SigmaContext ctx(sigma);
    return iterate_users(theta, covs, ctx, activity, noise_power, pilot_length).next_sigma;
}

juice::AmpReport juice::run_amp(const arma::cx_mat &rx, const arma::cx_mat &pilots, const CovarianceSet &covs,
                                double activity, double noise_power, const AmpOptions &options)
{
    if (options.max_iterations < 1)
        throw InputError("run_amp: max_iterations must be at least 1.");
    if (rx.n_rows != pilots.n_rows || covs.size() != pilots.n_cols || covs.antennas() != rx.n_cols)
        throw InputError("run_amp: received signal, pilots and covariances disagree in dimension.");
    if (!rx.is_finite() || !pilots.is_finite())
        throw InputError("run_amp: non-finite input.");

    const arma::uword M = rx.n_cols;
    const arma::uword N = pilots.n_cols;
    const arma::uword tau = pilots.n_rows;
    const double rx_norm = arma::norm(rx, "fro");

    AmpReport report;
    arma::cx_mat estimate(M, N, arma::fill::zeros);
    arma::cx_mat residual = rx;
    arma::cx_mat sigma = se_init(covs, activity, noise_power, tau, options.init);

    for (arma::uword t = 1; t <= options.max_iterations; ++t)
    {
        arma::cx_mat theta = pseudo_data(residual, pilots, estimate);
        SigmaContext ctx(sigma);
        IterationTerms terms = iterate_users(theta, covs, ctx, activity, noise_power, tau);
        arma::cx_mat next_residual = residual_update(rx, pilots, terms.estimate, residual, terms.jacobian_sum);

        const double change_norm = arma::norm(terms.estimate - estimate, "fro");
        const double estimate_norm = arma::norm(terms.estimate, "fro");
        const double residual_norm = arma::norm(next_residual, "fro");

        report.sigma_trajectory.push_back(ctx.sigma);
        report.sigma_norm.push_back(arma::norm(ctx.sigma, "fro"));
        report.residual_norm.push_back(residual_norm);
        report.iterations = t;

        report.state.estimate = terms.estimate;
        report.state.residual = next_residual;
        report.state.sigma = ctx.sigma;
        report.state.pseudo_data = std::move(theta);
        report.state.psi = std::move(terms.psi);
        report.state.iteration = t;
        report.next_sigma = terms.next_sigma;

        if (!std::isfinite(residual_norm) || residual_norm > options.divergence_factor * std::max(rx_norm, 1e-300) ||
            !terms.next_sigma.is_finite())
        {
            report.status = AmpStatus::diverged;
            return report;
        }

        const bool converged = change_norm <= options.tolerance * estimate_norm;
        estimate = std::move(terms.estimate);
        residual = std::move(next_residual);
        sigma = std::move(terms.next_sigma);
        if (converged)
        {
            report.status = AmpStatus::converged;
            return report;
        }
    }
    report.status = AmpStatus::max_iterations;
    return report;
}
