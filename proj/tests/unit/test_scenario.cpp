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

#include <catch2/catch_amalgamated.hpp>

#include "juice/errors.hpp"
#include "juice/matrix_core.hpp"
#include "juice/scenario.hpp"

#include <cmath>
#include <numbers>

using Catch::Matchers::WithinAbs;

// Covered tests:
// - Configuration checks and SNR conversion
// - Local scattering covariance: Toeplitz structure, trace, zero-spread limit
// - Covariance set: normalization, cached roots, seed reproducibility
// - Pilot alphabet, unit-norm columns and empirical independence
// - Received signal in the noiseless case and noise power

TEST_CASE("scenario - Configuration")
{
    juice::SystemConfig c;
    CHECK_NOTHROW(c.validate());

    auto bad = c;
    bad.pilot_length = 0;
    CHECK_THROWS_AS(bad.validate(), juice::ConfigError);
    bad = c;
    bad.pilot_length = c.users + 1;
    CHECK_THROWS_AS(bad.validate(), juice::ConfigError);
    bad = c;
    bad.activity = 1.0;
    CHECK_THROWS_AS(bad.validate(), juice::ConfigError);
    bad = c;
    bad.noise_power = 0.0;
    CHECK_THROWS_AS(bad.validate(), juice::ConfigError);
    bad = c;
    bad.guard_radius = 200.0;
    CHECK_THROWS_AS(bad.validate(), juice::ConfigError);

    CHECK_THAT(juice::noise_power_from_snr_db(10.0), WithinAbs(0.1, 1e-15));
    CHECK_THAT(juice::noise_power_from_snr_db(0.0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(juice::snr_db_from_noise_power(0.01), WithinAbs(20.0, 1e-12));
}

TEST_CASE("scenario - Local scattering covariance")
{
    const double asd = 10.0 * std::numbers::pi / 180.0;
    arma::cx_mat R = juice::local_scattering_covariance(8, 0.3, asd, 0.5);

    CHECK(arma::norm(R - R.t(), "fro") < 1e-14);
    CHECK_THAT(std::real(arma::trace(R)), WithinAbs(8.0, 1e-12));

    // Toeplitz: entries depend on m - n only
    for (arma::uword m = 1; m < 8; ++m)
        for (arma::uword n = 1; n < 8; ++n)
            CHECK(std::abs(R(m, n) - R(m - 1, n - 1)) < 1e-14);

    // Entry (1, 0) by hand: phase pi sin(0.3), attenuation exp(-(asd pi cos 0.3)^2 / 2)
    double x = std::numbers::pi * std::cos(0.3) * asd;
    std::complex<double> expected = std::polar(std::exp(-0.5 * x * x), std::numbers::pi * std::sin(0.3));
    CHECK(std::abs(R(1, 0) - expected) < 1e-14);

    // Zero spread collapses to the rank-one steering outer product
    arma::cx_mat R0 = juice::local_scattering_covariance(6, -0.7, 0.0, 0.5);
    arma::cx_vec a(6);
    for (arma::uword m = 0; m < 6; ++m)
        a(m) = std::polar(1.0, std::numbers::pi * double(m) * std::sin(-0.7));
    CHECK(arma::norm(R0 - a * a.t(), "fro") < 1e-12);

    // Positive semidefinite with a spread
    CHECK(arma::min(arma::eig_sym(R)) > -1e-12);
}

TEST_CASE("scenario - Covariance set")
{
    juice::SystemConfig c;
    c.users = 30;
    c.antennas = 8;
    juice::Rng rng = juice::make_rng(5);
    auto covs = juice::build_covariances(c, rng);

    REQUIRE(covs.size() == 30);
    REQUIRE(covs.antennas() == 8);
    REQUIRE(covs.nominal_angles().size() == 30);
    arma::cx_mat total(8, 8, arma::fill::zeros);
    for (std::size_t i = 0; i < covs.size(); ++i)
    {
        CHECK_THAT(std::real(arma::trace(covs[i])), WithinAbs(8.0, 1e-10));
        CHECK(arma::norm(covs.root(i) * covs.root(i) - covs[i], "fro") < 1e-9);
        total += covs[i];
    }
    CHECK(arma::norm(total - covs.sum(), "fro") < 1e-12);

    juice::Rng again = juice::make_rng(5);
    auto covs2 = juice::build_covariances(c, again);
    for (std::size_t i = 0; i < covs.size(); ++i)
        CHECK(arma::approx_equal(covs[i], covs2[i], "absdiff", 0.0));

    std::vector<arma::cx_mat> mixed = {arma::eye<arma::cx_mat>(2, 2), arma::eye<arma::cx_mat>(3, 3)};
    CHECK_THROWS_AS(juice::CovarianceSet(mixed), juice::InputError);
}

TEST_CASE("scenario - Pilots")
{
    juice::SystemConfig c;
    c.users = 40;
    c.pilot_length = 12;
    juice::Rng rng = juice::make_rng(6);
    arma::cx_mat P = juice::gen_pilots(c, rng);

    REQUIRE(P.n_rows == 12);
    REQUIRE(P.n_cols == 40);
    const double a = 1.0 / std::sqrt(24.0);
    for (arma::uword i = 0; i < P.n_elem; ++i)
    {
        CHECK_THAT(std::abs(P(i).real()), WithinAbs(a, 1e-15));
        CHECK_THAT(std::abs(P(i).imag()), WithinAbs(a, 1e-15));
    }
    for (arma::uword k = 0; k < 40; ++k)
        CHECK_THAT(arma::norm(P.col(k)), WithinAbs(1.0, 1e-14));

    // Independence oracle: the mean of phi_0^H phi_1 over many draws is near zero
    const arma::uword draws = 10000;
    std::complex<double> acc = 0.0;
    for (arma::uword d = 0; d < draws; ++d)
    {
        juice::Rng r = juice::make_rng(77, 0, d);
        arma::cx_mat Q = juice::gen_pilots(c, r);
        acc += arma::cdot(Q.col(0), Q.col(1));
    }
    acc /= double(draws);
    CHECK(std::abs(acc) <= 3.0 / std::sqrt(12.0 * double(draws)));
}

TEST_CASE("scenario - Ground truth and received signal")
{
    juice::SystemConfig c;
    c.users = 400;
    c.antennas = 4;
    c.pilot_length = 20;
    juice::Rng rng = juice::make_rng(8);
    auto covs = juice::build_covariances(c, rng);
    auto g = juice::draw_ground_truth(c, covs, rng);

    for (arma::uword i = 0; i < c.users; ++i)
    {
        if (g.activity(i) == 0)
            CHECK(arma::norm(g.effective.col(i)) == 0.0);
        else
            CHECK(arma::approx_equal(g.effective.col(i), g.channels.col(i), "absdiff", 0.0));
    }
    CHECK(g.active_set().n_elem == arma::accu(g.activity));

    // Activity rate over many users: Binomial(20000, 0.05) within 4 standard deviations
    c.users = 20000;
    arma::uvec gamma = juice::sample_activity(c, rng);
    double rate = arma::mean(arma::conv_to<arma::vec>::from(gamma));
    CHECK(std::abs(rate - 0.05) < 4.0 * std::sqrt(0.05 * 0.95 / 20000.0));

    c.users = 400;
    arma::cx_mat P = juice::gen_pilots(c, rng);
    arma::cx_mat Y0 = juice::synthesize_rx(P, g.effective, 0.0, rng);
    CHECK(arma::norm(Y0 - P * g.effective.st(), "fro") < 1e-12);

    // Pure noise: per-entry power near sigma^2
    arma::cx_mat zero(4, 400, arma::fill::zeros);
    c.pilot_length = 200;
    arma::cx_mat P2 = juice::gen_pilots(c, rng);
    arma::cx_mat W = juice::synthesize_rx(P2, zero, 0.3, rng);
    double power = std::pow(arma::norm(W, "fro"), 2) / double(W.n_elem);
    CHECK_THAT(power, WithinAbs(0.3, 0.04));

    CHECK_THROWS_AS(juice::synthesize_rx(P, arma::cx_mat(4, 3, arma::fill::zeros), 0.1, rng), juice::InputError);
}
