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
#include "juice/random.hpp"
#include "juice/scenario.hpp"

#include <armadillo>
#include <cstdint>

namespace juice
{
    enum class Hypothesis
    {
        active,
        inactive
    };

    // Decay constant c in F(alpha) = sum_m g_m (1 - exp(-c alpha / lambda_m)).
    // Q = sum_m (lambda_m / 2) V_m with V_m chi-squared on two degrees of freedom, so each term is
    // exponential with mean lambda_m and c = 1. The Monte-Carlo calibration test pins this value.
    inline constexpr double quadform_exponent_constant = 1.0;

    // Spectrum of C^{1/2} Xi C^{1/2} with its partial-fraction weights.
    // Zero eigenvalues are dropped; near-duplicates (relative gap < 1e-6) are split by relative
    // perturbations of 1e-5 so that the weights exist.
    struct QuadFormSpectrum
    {
        arma::vec lambdas; // descending, strictly positive
        arma::vec weights; // g_m = prod_{j != m} lambda_m / (lambda_m - lambda_j)
    };

    struct UserPrediction
    {
        double p_md = 0.0;
        double p_fa = 0.0;
        double alpha = 0.0;
    };

    // Per-user miss-detection and false-alarm predictions for one Sigma
    struct DetectionPrediction
    {
        arma::vec p_md;
        arma::vec p_fa;
        arma::vec alphas;
        arma::vec levels;
        arma::cx_mat sigma;

        double mean_p_md() const { return arma::mean(p_md); }
        double mean_p_fa() const { return arma::mean(p_fa); }
    };

    struct TailEstimate
    {
        double tail = 0.0;      // Pr(Q > alpha)
        double std_error = 0.0; // binomial standard error of `tail`
        double mean = 0.0;      // sample mean of Q
        arma::uword samples = 0;
    };

    enum class SigmaMethod
    {
        amp_average,    // element-wise mean of converged Sigma over AMP runs
        state_evolution // fixed point of the state evolution with synthetic pseudo-data
    };

    struct SigmaCalibration
    {
        SigmaMethod method = SigmaMethod::amp_average;
        AmpOptions amp;                     // used by amp_average
        arma::uword samples_per_user = 100; // used by state_evolution
        arma::uword max_iterations = 200;   // used by state_evolution
        double tolerance = 1e-7;            // used by state_evolution, relative Frobenius change
    };

    // Xi = Sigma^{-1} - (R + Sigma)^{-1}, Hermitian PSD
    arma::cx_mat xi_matrix(const arma::cx_mat &R, const arma::cx_mat &sigma);

    // Covariance of theta under each hypothesis: Sigma + R (active) or Sigma (inactive)
    arma::cx_mat hypothesis_cov(const arma::cx_mat &R, const arma::cx_mat &sigma, Hypothesis hypothesis);

    QuadFormSpectrum quadform_spectrum(const arma::cx_mat &C, const arma::cx_mat &xi);

    // Pr(theta^H Xi theta <= alpha) for theta ~ CN(0, C), from the partial-fraction form.
    // Falls back to the phase-type evaluation when the weights are too large for the sum to be accurate.
    double quadform_cdf(const QuadFormSpectrum &spectrum, double alpha,
                        double exponent_constant = quadform_exponent_constant);

    // Same CDF as the survival of a hypoexponential chain, 1 - e_1^T expm(T alpha) 1.
    // Exact for repeated eigenvalues.
    double quadform_cdf_phase_type(const arma::vec &lambdas, double alpha,
                                   double exponent_constant = quadform_exponent_constant);

    UserPrediction predict_rates(const arma::cx_mat &R, const arma::cx_mat &sigma, double activity, double level);

    DetectionPrediction predict_all(const CovarianceSet &covs, const arma::cx_mat &sigma, double activity,
                                    const arma::vec &levels);

    // n draws of theta^H Xi theta with theta = C^{1/2} z, z ~ CN(0, I)
    arma::vec sample_quadform(const arma::cx_mat &C, const arma::cx_mat &xi, arma::uword n_samples, Rng &rng);

    TailEstimate mc_quadform_tail(const arma::cx_mat &C, const arma::cx_mat &xi, double alpha, arma::uword n_samples,
                                  Rng &rng);

    // Sigma at AMP convergence for the scenario (config, covs)
    arma::cx_mat converged_sigma(const SystemConfig &config, const CovarianceSet &covs, arma::uword calibration_trials,
                                 Rng &rng, const SigmaCalibration &calibration = {});
}
