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

#include "juice/theory.hpp"
#include "juice/detector.hpp"
#include "juice/errors.hpp"
#include "juice/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace
{
    constexpr double merge_gap = 1e-6;  // relative gap below which eigenvalues count as repeated
    constexpr double split_step = 1e-5; // relative spacing after splitting
    constexpr double weight_limit = 1e6;

    // Splits clusters of near-equal values (input sorted descending) symmetrically around their mean
    arma::vec split_clusters(const arma::vec &sorted)
    {
        arma::vec out = sorted;
        arma::uword start = 0;
        while (start < sorted.n_elem)
        {
            arma::uword end = start + 1;
            while (end < sorted.n_elem && (sorted(end - 1) - sorted(end)) < merge_gap * sorted(end - 1))
                ++end;
            const arma::uword k = end - start;
            if (k > 1)
            {
                const double center = arma::mean(sorted.subvec(start, end - 1));
                for (arma::uword j = 0; j < k; ++j)
                    out(start + j) = center * (1.0 + split_step * (0.5 * double(k - 1) - double(j)));
            }
            start = end;
        }
        return arma::sort(out, "descend");
    }

    arma::vec partial_fraction_weights(const arma::vec &lambdas)
    {
        arma::vec g(lambdas.n_elem, arma::fill::ones);
        for (arma::uword m = 0; m < lambdas.n_elem; ++m)
            for (arma::uword j = 0; j < lambdas.n_elem; ++j)
                if (j != m)
                    g(m) *= lambdas(m) / (lambdas(m) - lambdas(j));
        return g;
    }
}

arma::cx_mat juice::xi_matrix(const arma::cx_mat &R, const arma::cx_mat &sigma)
{
    require_square_finite(R, "xi_matrix");
    require_square_finite(sigma, "xi_matrix");
    if (R.n_rows != sigma.n_rows)
        throw InputError("xi_matrix: dimensions disagree.");
    const arma::cx_mat S = hermitian_part(sigma);
    return hermitian_part(PsdFactor(S).inverse() - PsdFactor(S + hermitian_part(R)).inverse());
}

arma::cx_mat juice::hypothesis_cov(const arma::cx_mat &R, const arma::cx_mat &sigma, Hypothesis hypothesis)
{
    if (R.n_rows != sigma.n_rows || R.n_cols != sigma.n_cols)
        throw InputError("hypothesis_cov: dimensions disagree.");
    if (hypothesis == Hypothesis::active)
        return hermitian_part(sigma + R);
    return hermitian_part(sigma);
}

juice::QuadFormSpectrum juice::quadform_spectrum(const arma::cx_mat &C, const arma::cx_mat &xi)
{
    require_square_finite(C, "quadform_spectrum");
    require_square_finite(xi, "quadform_spectrum");
    if (C.n_rows != xi.n_rows)
        throw InputError("quadform_spectrum: dimensions disagree.");

    const arma::cx_mat root = sqrt_psd(C);
    const arma::vec raw = eig_hermitian(root * hermitian_part(xi) * root).eigenvalues;

    const double scale = arma::norm(C, "fro") * arma::norm(xi, "fro");
    const double lambda_max = raw.n_elem ? raw(0) : 0.0;
    if (!(lambda_max > 0.0) || lambda_max <= 1e-14 * scale)
        throw DegenerateSpectrumError("quadform_spectrum: quadratic form is identically zero.");

    // Eigenvalues below 1e-9 lambda_max shift Q by a negligible amount; negative ones are round-off
    arma::vec kept = raw.elem(arma::find(raw > 1e-9 * lambda_max));

    QuadFormSpectrum out;
    out.lambdas = split_clusters(kept);
    out.weights = partial_fraction_weights(out.lambdas);
    return out;
}

double juice::quadform_cdf(const QuadFormSpectrum &spectrum, double alpha, double exponent_constant)
{
    if (std::isnan(alpha))
        throw InputError("quadform_cdf: alpha is NaN.");
    if (alpha <= 0.0)
        return 0.0;
    if (std::isinf(alpha))
        return 1.0;

    const bool usable = spectrum.weights.is_finite() && arma::abs(spectrum.weights).max() <= weight_limit;
    if (!usable)
        return quadform_cdf_phase_type(spectrum.lambdas, alpha, exponent_constant);

    double F = 0.0;
    for (arma::uword m = 0; m < spectrum.lambdas.n_elem; ++m)
        F += spectrum.weights(m) * -std::expm1(-exponent_constant * alpha / spectrum.lambdas(m));
    return std::clamp(F, 0.0, 1.0);
}

double juice::quadform_cdf_phase_type(const arma::vec &lambdas, double alpha, double exponent_constant)
{
    if (alpha <= 0.0)
        return 0.0;
    if (std::isinf(alpha))
        return 1.0;
    const arma::uword M = lambdas.n_elem;
    if (M == 0)
        throw DegenerateSpectrumError("quadform_cdf_phase_type: empty spectrum.");

    // Sub-generator of the chain E_1 -> E_2 -> ... -> E_M; rate of stage m is c / lambda_m
    arma::vec rates(M);
    for (arma::uword m = 0; m < M; ++m)
    {
        if (!(lambdas(m) > 0.0))
            throw DegenerateSpectrumError("quadform_cdf_phase_type: eigenvalues must be positive.");
        rates(m) = exponent_constant / lambdas(m);
    }
    const double q = rates.max();

    // expm(T h) for h = alpha / 2^s by uniformization, then s squarings. Every factor is entrywise
    // non-negative, so no cancellation occurs even when the rates span many decades.
    int s = 0;
    double h = alpha;
    while (q * h > 0.5)
    {
        h *= 0.5;
        ++s;
    }
    arma::mat P(M, M, arma::fill::eye); // I + T / q
    for (arma::uword m = 0; m < M; ++m)
    {
        P(m, m) = 1.0 - rates(m) / q;
        if (m + 1 < M)
            P(m, m + 1) = rates(m) / q;
    }
    arma::mat E(M, M, arma::fill::zeros);
    arma::mat term(M, M, arma::fill::eye);
    const double qh = q * h;
    double coeff = std::exp(-qh);
    for (int k = 0; k < 40; ++k)
    {
        E += coeff * term;
        term = term * P;
        coeff *= qh / double(k + 1);
    }
    for (int i = 0; i < s; ++i)
        E = E * E;

    const double survival = arma::accu(E.row(0));
    return std::clamp(1.0 - survival, 0.0, 1.0);
}

juice::UserPrediction juice::predict_rates(const arma::cx_mat &R, const arma::cx_mat &sigma, double activity,
                                           double level)
{
    const arma::cx_mat xi = xi_matrix(R, sigma);
    UserPrediction out;
    out.alpha = compute_alpha(R, sigma, activity, level);

    const QuadFormSpectrum active = quadform_spectrum(hypothesis_cov(R, sigma, Hypothesis::active), xi);
    const QuadFormSpectrum inactive = quadform_spectrum(hypothesis_cov(R, sigma, Hypothesis::inactive), xi);
    out.p_md = quadform_cdf(active, out.alpha);
    out.p_fa = 1.0 - quadform_cdf(inactive, out.alpha);
    return out;
}

juice::DetectionPrediction juice::predict_all(const CovarianceSet &covs, const arma::cx_mat &sigma, double activity,
                                              const arma::vec &levels)
{
    if (levels.n_elem != covs.size())
        throw InputError("predict_all: one threshold level per user is required.");

    DetectionPrediction out;
    out.sigma = hermitian_part(sigma);
    out.levels = levels;
    out.p_md.set_size(covs.size());
    out.p_fa.set_size(covs.size());
    out.alphas.set_size(covs.size());
    for (std::size_t i = 0; i < covs.size(); ++i)
    {
        UserPrediction p = predict_rates(covs[i], out.sigma, activity, levels(i));
        out.p_md(i) = p.p_md;
        out.p_fa(i) = p.p_fa;
        out.alphas(i) = p.alpha;
    }
    return out;
}

arma::vec juice::sample_quadform(const arma::cx_mat &C, const arma::cx_mat &xi, arma::uword n_samples, Rng &rng)
{
    require_square_finite(C, "sample_quadform");
    require_square_finite(xi, "sample_quadform");
    if (C.n_rows != xi.n_rows)
        throw InputError("sample_quadform: dimensions disagree.");

    const arma::cx_mat root = sqrt_psd(C);
    const arma::cx_mat B = hermitian_part(root * hermitian_part(xi) * root);
    const arma::uword M = C.n_rows;
    constexpr arma::uword batch = 4096;

    arma::vec out(n_samples);
    for (arma::uword first = 0; first < n_samples; first += batch)
    {
        const arma::uword count = std::min(batch, n_samples - first);
        arma::cx_mat Z = complex_normal_matrix(M, count, rng);
        arma::cx_mat BZ = B * Z;
        arma::rowvec q = arma::real(arma::sum(arma::conj(Z) % BZ, 0));
        out.subvec(first, first + count - 1) = q.t();
    }
    return out;
}

juice::TailEstimate juice::mc_quadform_tail(const arma::cx_mat &C, const arma::cx_mat &xi, double alpha,
                                            arma::uword n_samples, Rng &rng)
{
    if (n_samples < 1000)
        throw InputError("mc_quadform_tail: at least 1000 samples are required.");
    const arma::vec q = sample_quadform(C, xi, n_samples, rng);

    TailEstimate out;
    out.samples = n_samples;
    out.tail = double(arma::accu(q > alpha)) / double(n_samples);
    out.std_error = std::sqrt(std::max(out.tail * (1.0 - out.tail), 0.0) / double(n_samples));
    out.mean = arma::mean(q);
    return out;
}

namespace
{
    arma::cx_mat sigma_by_amp_average(const juice::SystemConfig &config, const juice::CovarianceSet &covs,
                                      arma::uword trials, juice::Rng &rng, const juice::AmpOptions &options)
    {
        const std::uint64_t base = rng();
        arma::cx_mat acc(config.antennas, config.antennas, arma::fill::zeros);
        arma::uword used = 0;
        for (arma::uword k = 0; k < trials; ++k)
        {
            juice::Rng trial_rng = juice::make_rng(base, 0, k);
            juice::GroundTruth truth = juice::draw_ground_truth(config, covs, trial_rng);
            arma::cx_mat pilots = juice::gen_pilots(config, trial_rng);
            arma::cx_mat rx = juice::synthesize_rx(pilots, truth.effective, config.noise_power, trial_rng);
            juice::AmpReport report = juice::run_amp(rx, pilots, covs, config.activity, config.noise_power, options);
            if (report.diverged())
                continue;
            acc += report.state.sigma;
            ++used;
        }
        if (used == 0)
            throw juice::StateError("converged_sigma: AMP diverged in every calibration trial.");
        return juice::hermitian_part(acc / double(used));
    }

    // Expected posterior covariance of one user under both hypotheses, with fixed standard-normal draws
    arma::cx_mat expected_posterior_cov(const arma::cx_mat &R, const arma::cx_mat &sigma,
                                        const arma::cx_mat &sigma_inverse, const arma::cx_mat &sigma_lower,
                                        double logdet_sigma, double activity, const arma::cx_mat &draws)
    {
        const arma::uword M = R.n_rows;
        const arma::uword K = draws.n_cols;

        arma::cx_mat lower;
        if (!arma::chol(lower, juice::hermitian_part(sigma + R), "lower"))
            throw juice::StateError("converged_sigma: R + Sigma is not positive definite.");
        double logdet = 0.0;
        for (arma::uword m = 0; m < M; ++m)
            logdet += 2.0 * std::log(lower(m, m).real());
        const double u = logdet - logdet_sigma;
        const arma::cx_mat Linv = arma::inv(arma::trimatl(lower));
        const arma::cx_mat K_inv = Linv.t() * Linv;

        const double prior_log_odds = std::log((1.0 - activity) / activity);
        arma::cx_mat out(M, M, arma::fill::zeros);
        for (int hyp = 0; hyp < 2; ++hyp)
        {
            const arma::cx_mat theta = (hyp == 1 ? lower : sigma_lower) * draws;
            const arma::cx_mat k_theta = K_inv * theta;
            const arma::cx_mat xi_theta = sigma_inverse * theta - k_theta;
            const arma::cx_mat shrunk = theta - sigma * k_theta;
            const arma::rowvec w = arma::real(arma::sum(arma::conj(theta) % xi_theta, 0));

            arma::cx_mat factor(M, K);
            double psi_mean = 0.0;
            for (arma::uword k = 0; k < K; ++k)
            {
                double e = std::clamp(u - w(k), -500.0, 500.0);
                double psi = 1.0 / (1.0 + std::exp(prior_log_odds + e));
                psi_mean += psi;
                factor.col(k) = std::sqrt(std::max(psi - psi * psi, 0.0)) * shrunk.col(k);
            }
            psi_mean /= double(K);
            arma::cx_mat cov = factor * factor.t() / double(K) + psi_mean * (sigma - sigma * K_inv * sigma);
            out += (hyp == 1 ? activity : 1.0 - activity) * cov;
        }
        return out;
    }

    arma::cx_mat sigma_by_state_evolution(const juice::SystemConfig &config, const juice::CovarianceSet &covs,
                                          juice::Rng &rng, const juice::SigmaCalibration &cal)
    {
        const arma::uword M = config.antennas;
        const arma::uword N = config.users;
        const std::uint64_t base = rng();

        std::vector<arma::cx_mat> draws;
        draws.reserve(N);
        for (arma::uword i = 0; i < N; ++i)
        {
            juice::Rng user_rng = juice::make_rng(base, 1, i);
            draws.push_back(juice::complex_normal_matrix(M, cal.samples_per_user, user_rng));
        }

        arma::cx_mat sigma = juice::se_init(covs, config.activity, config.noise_power, config.pilot_length,
                                            cal.amp.init);
        for (arma::uword t = 0; t < cal.max_iterations; ++t)
        {
            juice::PsdFactor factor(sigma);
            arma::cx_mat sigma_lower;
            arma::chol(sigma_lower, sigma, "lower");
            const arma::cx_mat sigma_inverse = factor.inverse();

            arma::cx_mat acc(M, M, arma::fill::zeros);
            for (arma::uword i = 0; i < N; ++i)
                acc += expected_posterior_cov(covs[i], sigma, sigma_inverse, sigma_lower, factor.logdet(),
                                              config.activity, draws[i]);

            arma::cx_mat next = juice::hermitian_part(config.noise_power * arma::eye<arma::cx_mat>(M, M) +
                                                      acc / double(config.pilot_length));
            const double change = arma::norm(next - sigma, "fro") / arma::norm(next, "fro");
            sigma = std::move(next);
            if (change <= cal.tolerance)
                break;
        }
        return sigma;
    }
}

arma::cx_mat juice::converged_sigma(const SystemConfig &config, const CovarianceSet &covs,
                                    arma::uword calibration_trials, Rng &rng, const SigmaCalibration &calibration)
{
    config.validate();
    if (covs.size() != config.users || covs.antennas() != config.antennas)
        throw InputError("converged_sigma: covariance set does not match the configuration.");
    if (calibration.method == SigmaMethod::amp_average)
    {
        if (calibration_trials < 1)
            throw InputError("converged_sigma: at least one calibration trial is required.");
        return sigma_by_amp_average(config, covs, calibration_trials, rng, calibration.amp);
    }
    return sigma_by_state_evolution(config, covs, rng, calibration);
}
