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

#include "juice/detector.hpp"
#include "juice/amp.hpp"
#include "juice/errors.hpp"
#include "juice/matrix_core.hpp"

#include <cmath>
#include <limits>

namespace
{
    void require_level(double level, double activity)
    {
        if (!(level > 0.0 && level < 1.0))
            throw juice::ConfigError("threshold level must lie in (0, 1).");
        if (!(activity > 0.0 && activity < 1.0))
            throw juice::ConfigError("activity probability must lie in (0, 1).");
    }

    double alpha_from_u(double u, double activity, double level)
    {
        return u - std::log(activity * (1.0 - level) / (level * (1.0 - activity)));
    }
}

juice::ThresholdPolicy::ThresholdPolicy(arma::uword users, double level)
    : ThresholdPolicy(arma::vec(users, arma::fill::value(level)))
{
}

juice::ThresholdPolicy::ThresholdPolicy(arma::vec levels) : levels_(std::move(levels))
{
    for (double l : levels_)
        if (!(l > 0.0 && l < 1.0))
            throw ConfigError("threshold level must lie in (0, 1).");
}

void juice::ThresholdPolicy::update(const CovarianceSet &covs, const arma::cx_mat &sigma, double activity)
{
    if (covs.size() != levels_.n_elem)
        throw InputError("ThresholdPolicy: number of users does not match the covariance set.");
    alphas_.set_size(levels_.n_elem);
    const double logdet_sigma = logdet_psd(sigma);
    for (arma::uword i = 0; i < levels_.n_elem; ++i)
    {
        require_level(levels_(i), activity);
        double u = logdet_psd(sigma + covs[i]) - logdet_sigma;
        alphas_(i) = alpha_from_u(u, activity, levels_(i));
    }
}

double juice::compute_alpha(const arma::cx_mat &R, const arma::cx_mat &sigma, double activity, double level)
{
    require_level(level, activity);
    return alpha_from_u(log_det_ratio(R, sigma), activity, level);
}

arma::uword juice::decide(const arma::cx_vec &theta, const arma::cx_mat &R, const arma::cx_mat &sigma, double alpha)
{
    return activity_statistic(theta, R, sigma) >= alpha ? 1 : 0;
}

arma::uvec juice::decide_all(const arma::cx_mat &theta, const CovarianceSet &covs, const arma::cx_mat &sigma,
                             double activity, const arma::vec &levels)
{
    if (theta.n_cols != covs.size() || levels.n_elem != covs.size() || theta.n_rows != sigma.n_rows)
        throw InputError("decide_all: dimensions disagree.");

    const arma::cx_mat S = hermitian_part(sigma);
    PsdFactor sigma_factor(S);
    arma::uvec decisions(theta.n_cols);
    for (arma::uword i = 0; i < theta.n_cols; ++i)
    {
        require_level(levels(i), activity);
        PsdFactor combined(S + covs[i]);
        const arma::cx_vec th = theta.col(i);
        double w = std::max(0.0, sigma_factor.inverse_quadratic(th) - combined.inverse_quadratic(th));
        double alpha = alpha_from_u(combined.logdet() - sigma_factor.logdet(), activity, levels(i));
        decisions(i) = w >= alpha ? 1 : 0;
    }
    return decisions;
}
