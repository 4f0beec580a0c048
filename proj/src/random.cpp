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

#include "juice/random.hpp"

#include <cmath>

std::uint64_t juice::mix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

juice::Rng juice::make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
{
    std::uint64_t s = mix64(seed);
    s = mix64(s ^ mix64(stream + 0x632BE59BD9B4E019ULL));
    s = mix64(s ^ mix64(index + 0x8CB92BA72F3D8DD7ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
    return Rng(seq);
}

std::complex<double> juice::complex_normal(Rng &rng)
{
    static const double scale = std::sqrt(0.5);
    std::normal_distribution<double> normal(0.0, 1.0);
    double re = normal(rng);
    double im = normal(rng);
    return {scale * re, scale * im};
}

arma::cx_mat juice::complex_normal_matrix(arma::uword rows, arma::uword cols, Rng &rng)
{
    arma::cx_mat out(rows, cols);
    for (arma::uword i = 0; i < out.n_elem; ++i)
        out(i) = complex_normal(rng);
    return out;
}

double juice::uniform01(Rng &rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}
