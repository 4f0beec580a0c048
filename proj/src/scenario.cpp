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

#include "juice/scenario.hpp"
#include "juice/errors.hpp"
#include "juice/matrix_core.hpp"

#include <cmath>
#include <numbers>
#include <string>

void juice::SystemConfig::validate() const
{
    if (users < 1)
        throw ConfigError("users (N) must be at least 1.");
    if (antennas < 1)
        throw ConfigError("antennas (M) must be at least 1.");
    if (pilot_length < 1 || pilot_length > users)
        throw ConfigError("pilot_length must satisfy 1 <= tau_p <= N (got " + std::to_string(pilot_length) + ").");
    if (!(activity > 0.0 && activity < 1.0))
        throw ConfigError("activity must lie in (0, 1).");
    if (!(noise_power > 0.0) || !std::isfinite(noise_power))
        throw ConfigError("noise_power must be positive and finite.");
    if (!(asd_deg >= 0.0) || !std::isfinite(asd_deg))
        throw ConfigError("asd_deg must be non-negative.");
    if (!(cell_radius > 0.0) || !(guard_radius >= 0.0) || guard_radius >= cell_radius)
        throw ConfigError("cell geometry requires 0 <= guard_radius < cell_radius.");
    if (!(antenna_spacing > 0.0) || !std::isfinite(antenna_spacing))
        throw ConfigError("antenna_spacing must be positive.");
}

double juice::noise_power_from_snr_db(double snr_db)
{
    return std::pow(10.0, -snr_db / 10.0);
}

double juice::snr_db_from_noise_power(double noise_power)
{
    return -10.0 * std::log10(noise_power);
}

juice::CovarianceSet::CovarianceSet(std::vector<arma::cx_mat> covariances, std::vector<double> nominal_angles)
    : covariances_(std::move(covariances)), angles_(std::move(nominal_angles))
{
    if (covariances_.empty())
        return;
    const arma::uword M = covariances_.front().n_rows;
    roots_.reserve(covariances_.size());
    for (auto &R : covariances_)
    {
        require_square_finite(R, "CovarianceSet");
        if (R.n_rows != M)
            throw InputError("CovarianceSet: all covariances must share one dimension.");
        R = hermitian_part(R);
        roots_.push_back(sqrt_psd(R));
    }
}

arma::cx_mat juice::CovarianceSet::sum() const
{
    arma::cx_mat acc(antennas(), antennas(), arma::fill::zeros);
    for (const auto &R : covariances_)
        acc += R;
    return acc;
}

arma::cx_mat juice::local_scattering_covariance(arma::uword antennas, double nominal_angle, double asd_rad,
                                                double antenna_spacing)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double s = std::sin(nominal_angle);
    const double c = std::cos(nominal_angle);

    arma::cx_mat R(antennas, antennas);
    for (arma::uword n = 0; n < antennas; ++n)
        for (arma::uword m = 0; m < antennas; ++m)
        {
            double delta = two_pi * antenna_spacing * (double(m) - double(n));
            double spread = delta * c * asd_rad;
            double magnitude = std::exp(-0.5 * spread * spread);
            R(m, n) = std::polar(magnitude, delta * s);
        }
    return R;
}

juice::CovarianceSet juice::build_covariances(const SystemConfig &config, Rng &rng)
{
    config.validate();
    const double asd_rad = config.asd_deg * std::numbers::pi / 180.0;
    const double M = double(config.antennas);
    const double inner = config.guard_radius / config.cell_radius;

    std::vector<arma::cx_mat> covs;
    std::vector<double> angles;
    covs.reserve(config.users);
    angles.reserve(config.users);

    for (arma::uword i = 0; i < config.users; ++i)
    {
        // Uniform position in the annulus between the guard radius and the cell edge
        double u = uniform01(rng);
        double radius = config.cell_radius * std::sqrt(inner * inner + (1.0 - inner * inner) * u);
        double azimuth = 2.0 * std::numbers::pi * uniform01(rng);
        double angle = std::atan2(radius * std::sin(azimuth), radius * std::cos(azimuth));

        arma::cx_mat R = local_scattering_covariance(config.antennas, angle, asd_rad, config.antenna_spacing);
        R *= M / std::real(arma::trace(R));
        covs.push_back(std::move(R));
        angles.push_back(angle);
    }
    return CovarianceSet(std::move(covs), std::move(angles));
}

arma::uvec juice::sample_activity(const SystemConfig &config, Rng &rng)
{
    config.validate();
    arma::uvec gamma(config.users);
    for (arma::uword i = 0; i < config.users; ++i)
        gamma(i) = uniform01(rng) < config.activity ? 1 : 0;
    return gamma;
}

arma::cx_mat juice::sample_channels(const CovarianceSet &covs, Rng &rng)
{
    const arma::uword M = covs.antennas();
    arma::cx_mat H(M, covs.size());
    for (std::size_t i = 0; i < covs.size(); ++i)
    {
        arma::cx_vec hbar = complex_normal_matrix(M, 1, rng);
        H.col(i) = covs.root(i) * hbar;
    }
    return H;
}

juice::GroundTruth juice::draw_ground_truth(const SystemConfig &config, const CovarianceSet &covs, Rng &rng)
{
    if (covs.size() != config.users || covs.antennas() != config.antennas)
        throw InputError("draw_ground_truth: covariance set does not match the configuration.");

    GroundTruth truth;
    truth.activity = sample_activity(config, rng);
    truth.channels = sample_channels(covs, rng);
    truth.effective = truth.channels;
    for (arma::uword i = 0; i < config.users; ++i)
        if (truth.activity(i) == 0)
            truth.effective.col(i).zeros();
    return truth;
}

arma::cx_mat juice::gen_pilots(const SystemConfig &config, Rng &rng)
{
    config.validate();
    const double a = 1.0 / std::sqrt(2.0 * double(config.pilot_length));
    arma::cx_mat pilots(config.pilot_length, config.users);

    std::uint64_t bits = 0;
    int available = 0;
    for (arma::uword i = 0; i < pilots.n_elem; ++i)
    {
        if (available < 2)
        {
            bits = rng();
            available = 64;
        }
        double re = (bits & 1U) ? a : -a;
        double im = (bits & 2U) ? a : -a;
        bits >>= 2;
        available -= 2;
        pilots(i) = {re, im};
    }
    return pilots;
}

arma::cx_mat juice::synthesize_rx(const arma::cx_mat &pilots, const arma::cx_mat &effective, double noise_power,
                                  Rng &rng)
{
    if (pilots.n_cols != effective.n_cols)
        throw InputError("synthesize_rx: pilot and channel matrices disagree on the number of users.");
    if (!(noise_power >= 0.0))
        throw InputError("synthesize_rx: noise power must be non-negative.");

    arma::cx_mat Y = pilots * effective.st();
    if (noise_power > 0.0)
        Y += std::sqrt(noise_power) * complex_normal_matrix(Y.n_rows, Y.n_cols, rng);
    return Y;
}
