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

#include "juice/amp.hpp"
#include "juice/detector.hpp"
#include "juice/errors.hpp"
#include "juice/validation.hpp"

#include <cmath>

using Catch::Matchers::WithinAbs;

// Covered tests:
// - Threshold from the level in closed form
// - Decision rule equals thresholding the activity posterior
// - Batch decisions and the threshold policy agree with single-user calls

TEST_CASE("detector - Threshold")
{
    arma::cx_mat one(1, 1, arma::fill::ones);
    // u = ln 2; eps = l = 0.5 gives alpha = u
    CHECK_THAT(juice::compute_alpha(one, one, 0.5, 0.5), WithinAbs(std::log(2.0), 1e-14));
    // eps = 0.05, l = 0.5: alpha = ln 2 - ln(0.05 / 0.95)
    CHECK_THAT(juice::compute_alpha(one, one, 0.05, 0.5), WithinAbs(std::log(2.0) + std::log(19.0), 1e-13));

    // alpha increases with l
    juice::Rng rng = juice::make_rng(31);
    arma::cx_mat R = juice::validation::random_psd(4, rng, 0.1);
    arma::cx_mat S = juice::validation::random_psd(4, rng, 0.1);
    double previous = -1e300;
    for (double l : {0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99})
    {
        double a = juice::compute_alpha(R, S, 0.05, l);
        CHECK(a > previous);
        previous = a;
    }

    CHECK_THROWS_AS(juice::compute_alpha(R, S, 0.05, 0.0), juice::ConfigError);
    CHECK_THROWS_AS(juice::compute_alpha(R, S, 0.05, 1.0), juice::ConfigError);
    CHECK_THROWS_AS(juice::compute_alpha(R, S, 1.0, 0.5), juice::ConfigError);
}

TEST_CASE("detector - Equivalence with the posterior")
{
    juice::Rng rng = juice::make_rng(32);
    for (int k = 0; k < 200; ++k)
    {
        arma::uword M = 1 + arma::uword(k % 4);
        arma::cx_mat R = juice::validation::random_psd(M, rng, 0.1);
        arma::cx_mat S = juice::validation::random_psd(M, rng, 0.2);
        arma::cx_vec theta = (0.2 + 0.02 * k) * juice::complex_normal_matrix(M, 1, rng);
        double level = 0.05 + 0.9 * juice::uniform01(rng);

        double psi = juice::activity_posterior(theta, R, S, 0.05);
        double alpha = juice::compute_alpha(R, S, 0.05, level);
        arma::uword expected = psi >= level ? 1 : 0;
        // Skip decisions sitting on the boundary up to round-off
        if (std::abs(psi - level) > 1e-9)
            CHECK(juice::decide(theta, R, S, alpha) == expected);
    }
}

TEST_CASE("detector - Batch decisions")
{
    juice::Rng rng = juice::make_rng(33);
    const arma::uword M = 4, N = 50;
    std::vector<arma::cx_mat> list;
    for (arma::uword i = 0; i < N; ++i)
        list.push_back(juice::validation::random_psd(M, rng, 0.05));
    juice::CovarianceSet covs(list);
    arma::cx_mat S = juice::validation::random_psd(M, rng, 0.3);
    arma::cx_mat theta = juice::complex_normal_matrix(M, N, rng);
    for (arma::uword i = 0; i < N; i += 2)
        theta.col(i) *= 4.0;

    arma::vec levels = arma::linspace<arma::vec>(0.1, 0.9, N);
    juice::ThresholdPolicy policy(levels);
    policy.update(covs, S, 0.1);
    arma::uvec batch = juice::decide_all(theta, covs, S, 0.1, levels);
    REQUIRE(batch.n_elem == N);
    for (arma::uword i = 0; i < N; ++i)
    {
        CHECK_THAT(policy.alphas()(i), WithinAbs(juice::compute_alpha(covs[i], S, 0.1, levels(i)), 1e-10));
        CHECK(batch(i) == juice::decide(theta.col(i), covs[i], S, policy.alphas()(i)));
    }
    CHECK(arma::accu(batch) > 0);
    CHECK(arma::accu(batch) < N);

    juice::ThresholdPolicy flat(N, 0.5);
    CHECK(arma::all(flat.levels() == 0.5));
    CHECK_THROWS_AS(juice::ThresholdPolicy(N, 1.5), juice::ConfigError);
    juice::ThresholdPolicy short_policy(3, 0.5);
    CHECK_THROWS_AS(short_policy.update(covs, S, 0.1), juice::InputError);
    CHECK_THROWS_AS(juice::decide_all(theta.cols(0, 9), covs, S, 0.1, levels), juice::InputError);
}
