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
#include <vector>

namespace juice
{
    // Normalization of the initial state-evolution covariance
    enum class SigmaInit
    {
        pilot_scaled, // sigma^2 I + (eps / tau_p) sum_i R_i
        unscaled      // sigma^2 I + eps sum_i R_i
    };

    struct AmpOptions
    {
        arma::uword max_iterations = 50;
        double tolerance = 1e-6;          // on ||X_new - X_old||_F / ||X_new||_F
        double divergence_factor = 1e6;   // residual norm above this multiple of ||Y||_F counts as divergence
        SigmaInit init = SigmaInit::pilot_scaled;
    };

    enum class AmpStatus
    {
        converged,
        max_iterations,
        diverged
    };

    // Snapshot of the recursion after one iteration.
    // `pseudo_data` and `sigma` are the pair the denoiser consumed; `estimate` and `psi` are its outputs.
    struct AmpState
    {
        arma::cx_mat estimate;    // X_hat, M x N
        arma::cx_mat residual;    // Z, tau_p x M (already updated with the new estimate)
        arma::cx_mat sigma;       // state-evolution covariance, M x M
        arma::cx_mat pseudo_data; // Theta, M x N
        arma::vec psi;            // posterior activity, length N
        arma::uword iteration = 0;
    };

    struct AmpReport
    {
        AmpState state;
        arma::cx_mat next_sigma;                 // state-evolution output of the final iteration
        std::vector<arma::cx_mat> sigma_trajectory; // Sigma used at each iteration
        std::vector<double> sigma_norm;          // Frobenius norms of sigma_trajectory
        std::vector<double> residual_norm;       // ||Z||_F after each iteration
        AmpStatus status = AmpStatus::max_iterations;
        arma::uword iterations = 0;

        bool converged() const { return status == AmpStatus::converged; }
        bool diverged() const { return status == AmpStatus::diverged; }
    };

    // Theta = Z^T conj(Phi) + X_hat; column i is the pseudo-data of user i
    arma::cx_mat pseudo_data(const arma::cx_mat &residual, const arma::cx_mat &pilots, const arma::cx_mat &estimate);

    // u = log|R + Sigma| - log|Sigma|
    double log_det_ratio(const arma::cx_mat &R, const arma::cx_mat &sigma);

    // w = theta^H (Sigma^{-1} - (R + Sigma)^{-1}) theta
    double activity_statistic(const arma::cx_vec &theta, const arma::cx_mat &R, const arma::cx_mat &sigma);

    // Posterior activity probability under the Bernoulli-Gaussian prior; u - w is clamped to +-500.
    double activity_posterior(const arma::cx_vec &theta, const arma::cx_mat &R, const arma::cx_mat &sigma,
                              double activity);

    // Posterior mean E[x | theta] = psi * R (R + Sigma)^{-1} theta
    arma::cx_vec denoise(const arma::cx_vec &theta, const arma::cx_mat &R, const arma::cx_mat &sigma,
                         double activity);

    // Wirtinger Jacobian d eta / d theta^T (theta^* held fixed):
    //   J = psi A + psi (1 - psi) (A theta) (Xi theta)^H,  A = R (R + Sigma)^{-1}
    arma::cx_mat denoiser_jacobian(const arma::cx_vec &theta, const arma::cx_mat &R, const arma::cx_mat &sigma,
                                   double activity);

    // Z_next = Y - Phi X_next^T + (1 / tau_p) Z_prev J_sum^T, with J_sum the sum of the per-user Jacobians
    arma::cx_mat residual_update(const arma::cx_mat &rx, const arma::cx_mat &pilots, const arma::cx_mat &next_estimate,
                                 const arma::cx_mat &previous_residual, const arma::cx_mat &jacobian_sum);

    arma::cx_mat se_init(const CovarianceSet &covs, double activity, double noise_power, arma::uword pilot_length,
                         SigmaInit init = SigmaInit::pilot_scaled);

    // Sigma_next = sigma^2 I + (1 / tau_p) sum_i [(psi_i - psi_i^2) q_i q_i^H + psi_i Sigma (R_i + Sigma)^{-1} R_i],
    // i.e. sigma^2 I plus the summed posterior covariances of the users scaled by 1 / tau_p.
    arma::cx_mat se_step(const arma::cx_mat &sigma, const arma::cx_mat &theta, const CovarianceSet &covs,
                         double activity, double noise_power, arma::uword pilot_length);

    // Bayesian MMV-AMP from X_hat = 0, Z = Y, Sigma = se_init(...)
    AmpReport run_amp(const arma::cx_mat &rx, const arma::cx_mat &pilots, const CovarianceSet &covs, double activity,
                      double noise_power, const AmpOptions &options = {});
}
