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

#include <armadillo>
#include <complex>
#include <cstdint>
#include <random>

namespace juice
{
    using Rng = std::mt19937_64;

    // SplitMix64 finalizer; used to derive independent sub-seeds
    std::uint64_t mix64(std::uint64_t x);

    // Generator for stream (seed, stream, index). Distinct tuples give statistically independent streams.
    Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t index = 0);

    // Circularly-symmetric complex normal with unit variance, i.e. variance 1/2 per real component
    std::complex<double> complex_normal(Rng &rng);

    // Matrix of i.i.d. CN(0,1) entries, filled column by column
    arma::cx_mat complex_normal_matrix(arma::uword rows, arma::uword cols, Rng &rng);

    double uniform01(Rng &rng);
}
