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

namespace juice
{
    // Per-user probability thresholds l_i in (0,1) and the matching statistic thresholds alpha_i.
    // alpha depends on Sigma, so it is recomputed by `update` whenever Sigma changes.
    class ThresholdPolicy
    {
    public:
        // Same threshold for every user
        ThresholdPolicy(arma::uword users, double level);
        explicit ThresholdPolicy(arma::vec levels);

        const arma::vec &levels() const { return levels_; }
        const arma::vec &alphas() const { return alphas_; }

        void update(const CovarianceSet &covs, const arma::cx_mat &sigma, double activity);

    private:
        arma::vec levels_;
        arma::vec alphas_;
    };

    // alpha_i = u_i - log(eps (1 - l_i) / (l_i (1 - eps))), u_i = log|R_i + Sigma| - log|Sigma|
    double compute_alpha(const arma::cx_mat &R, const arma::cx_mat &sigma, double activity, double level);

    // 1 iff theta^H Xi theta >= alpha (ties are declared active)
    arma::uword decide(const arma::cx_vec &theta, const arma::cx_mat &R, const arma::cx_mat &sigma, double alpha);

    // Decisions for all users from the pseudo-data columns
    arma::uvec decide_all(const arma::cx_mat &theta, const CovarianceSet &covs, const arma::cx_mat &sigma,
                          double activity, const arma::vec &levels);
}
