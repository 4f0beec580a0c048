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
#include <cstddef>
#include <vector>

namespace juice
{
    enum class PathlossMode
    {
        unit_gain // Every user has (1/M) trace(R_i) = 1
    };

    // Scalar parameters of one single-cell uplink scenario
    struct SystemConfig
    {
        arma::uword users = 200;        // N
        arma::uword antennas = 16;      // M, uniform linear array
        arma::uword pilot_length = 25;  // tau_p
        double activity = 0.05;         // epsilon, Pr(user active)
        double noise_power = 0.1;       // sigma^2 (linear); SNR = 1 / sigma^2
        double cell_radius = 100.0;     // m
        double guard_radius = 5.0;      // m, no users closer than this
        double asd_deg = 10.0;          // angular standard deviation of the local scattering model
        double antenna_spacing = 0.5;   // in wavelengths
        PathlossMode pathloss = PathlossMode::unit_gain;

        // Throws ConfigError describing the first violated constraint
        void validate() const;
    };

    // sigma^2 = 10^(-SNR_dB / 10), valid for unit-norm pilots and unit average channel gain
    double noise_power_from_snr_db(double snr_db);
    double snr_db_from_noise_power(double noise_power);

    // Per-user spatial covariance matrices, with their PSD square roots cached for channel sampling.
    // Generated once per experiment and shared by all coherence blocks.
    class CovarianceSet
    {
    public:
        CovarianceSet() = default;
        explicit CovarianceSet(std::vector<arma::cx_mat> covariances, std::vector<double> nominal_angles = {});

        std::size_t size() const { return covariances_.size(); }
        arma::uword antennas() const { return covariances_.empty() ? 0 : covariances_.front().n_rows; }

        const arma::cx_mat &operator[](std::size_t i) const { return covariances_[i]; }
        const arma::cx_mat &root(std::size_t i) const { return roots_[i]; }
        const std::vector<arma::cx_mat> &matrices() const { return covariances_; }

        // Nominal angle of arrival (radians), empty for hand-built sets
        const std::vector<double> &nominal_angles() const { return angles_; }

        // sum_i R_i
        arma::cx_mat sum() const;

    private:
        std::vector<arma::cx_mat> covariances_;
        std::vector<arma::cx_mat> roots_;
        std::vector<double> angles_;
    };

    // Activity, channels and effective channels of one coherence block
    struct GroundTruth
    {
        arma::uvec activity;    // gamma, length N, entries in {0,1}
        arma::cx_mat channels;  // H, M x N
        arma::cx_mat effective; // X, M x N, column i equals gamma_i * h_i

        arma::uvec active_set() const { return arma::find(activity); }
    };

    // Gaussian local scattering covariance of a ULA for a nominal angle (radians).
    // Entry (m,n) = exp(j 2 pi d (m-n) sin(phi)) * exp(-(asd^2 / 2) * (2 pi d (m-n) cos(phi))^2).
    arma::cx_mat local_scattering_covariance(arma::uword antennas, double nominal_angle, double asd_rad,
                                             double antenna_spacing);

    CovarianceSet build_covariances(const SystemConfig &config, Rng &rng);

    arma::uvec sample_activity(const SystemConfig &config, Rng &rng);

    // h_i = R_i^{1/2} * hbar_i with hbar_i ~ CN(0, I); returns M x N
    arma::cx_mat sample_channels(const CovarianceSet &covs, Rng &rng);

    GroundTruth draw_ground_truth(const SystemConfig &config, const CovarianceSet &covs, Rng &rng);

    // tau_p x N matrix of normalized QPSK symbols (+-1 +-j) / sqrt(2 tau_p)
    arma::cx_mat gen_pilots(const SystemConfig &config, Rng &rng);

    // Y = Phi * X^T + W, W with i.i.d. CN(0, sigma^2) entries; returns tau_p x M
    arma::cx_mat synthesize_rx(const arma::cx_mat &pilots, const arma::cx_mat &effective, double noise_power,
                               Rng &rng);
}
