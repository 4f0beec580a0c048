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

#include "juice/random.hpp"

#include <armadillo>
#include <functional>
#include <iosfwd>
#include <vector>

// Reference computations that do not share code paths with the estimators they check.
namespace juice::validation
{
    // G G^H / M + floor * I with G standard complex normal
    arma::cx_mat random_psd(arma::uword M, Rng &rng, double floor = 0.0);

    // Same, with eigenvalue spread: U diag(d) U^H with d log-uniform on [low, high]
    arma::cx_mat random_spread_psd(arma::uword M, Rng &rng, double low, double high);

    // Wirtinger derivative d f / d x^T (x^* held fixed) by central differences along the real and
    // imaginary axes of each coordinate: (d/da - j d/db) / 2
    arma::cx_mat finite_difference_jacobian(const std::function<arma::cx_vec(const arma::cx_vec &)> &f,
                                            const arma::cx_vec &x, double step = 1e-6);

    // max_x |F(x) - F_n(x)| between a CDF and the empirical CDF of `samples`
    double sup_distance(const std::function<double(double)> &cdf, arma::vec samples);

    struct JacobianCheck
    {
        arma::uword instances = 0;
        double worst_relative_error = 0.0; // max |J - J_fd| / max |J_fd|
    };

    // Random (theta, R, Sigma, eps) instances with M drawn from `dims`
    JacobianCheck check_denoiser_jacobian(arma::uword instances, const std::vector<arma::uword> &dims, Rng &rng);

    struct QuadformCheck
    {
        arma::uword instances = 0;
        double worst_sup_distance = 0.0;
        double worst_mean_error = 0.0; // relative error of the sample mean against trace(Xi C)
    };

    // Random (C, Xi) pairs built as in detection: Xi = Sigma^{-1} - (R + Sigma)^{-1}, C in {Sigma, Sigma + R}
    QuadformCheck check_quadform_cdf(arma::uword instances, const std::vector<arma::uword> &dims,
                                     arma::uword cdf_samples, arma::uword mean_samples, Rng &rng,
                                     double exponent_constant);

    // Runs the oracle suites behind `juice_sim validate`; prints one line per check, returns true if all pass
    bool run_validation(std::uint64_t seed, std::ostream &out);
}
