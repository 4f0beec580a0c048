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

#include "juice/validation.hpp"
#include "juice/amp.hpp"
#include "juice/matrix_core.hpp"
#include "juice/theory.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

arma::cx_mat juice::validation::random_psd(arma::uword M, Rng &rng, double floor)
{
    arma::cx_mat G = complex_normal_matrix(M, M, rng);
    arma::cx_mat A = G * G.t() / double(M);
    A.diag() += floor;
    return 0.5 * (A + A.t());
}

arma::cx_mat juice::validation::random_spread_psd(arma::uword M, Rng &rng, double low, double high)
{
    arma::cx_mat Q, Rq;
    arma::qr(Q, Rq, complex_normal_matrix(M, M, rng));
    arma::vec d(M);
    for (arma::uword m = 0; m < M; ++m)
        d(m) = std::exp(std::log(low) + (std::log(high) - std::log(low)) * uniform01(rng));
    arma::cx_mat A = Q * arma::diagmat(arma::conv_to<arma::cx_vec>::from(d)) * Q.t();
    return 0.5 * (A + A.t());
}

arma::cx_mat juice::validation::finite_difference_jacobian(
    const std::function<arma::cx_vec(const arma::cx_vec &)> &f, const arma::cx_vec &x, double step)
{
    const arma::uword n = x.n_elem;
    const std::complex<double> j(0.0, 1.0);
    arma::cx_mat J;
    for (arma::uword k = 0; k < n; ++k)
    {
        arma::cx_vec xp = x, xm = x;
        xp(k) += step;
        xm(k) -= step;
        arma::cx_vec d_re = (f(xp) - f(xm)) / (2.0 * step);

        xp = x;
        xm = x;
        xp(k) += j * step;
        xm(k) -= j * step;
        arma::cx_vec d_im = (f(xp) - f(xm)) / (2.0 * step);

        if (k == 0)
            J.set_size(d_re.n_elem, n);
        J.col(k) = 0.5 * (d_re - j * d_im);
    }
    return J;
}

double juice::validation::sup_distance(const std::function<double(double)> &cdf, arma::vec samples)
{
    samples = arma::sort(samples);
    const double n = double(samples.n_elem);
    double worst = 0.0;
    for (arma::uword i = 0; i < samples.n_elem; ++i)
    {
        const double F = cdf(samples(i));
        worst = std::max({worst, std::abs(F - double(i) / n), std::abs(F - double(i + 1) / n)});
    }
    return worst;
}

juice::validation::JacobianCheck juice::validation::check_denoiser_jacobian(arma::uword instances,
                                                                           const std::vector<arma::uword> &dims,
                                                                           Rng &rng)
{
    JacobianCheck out;
    for (arma::uword n = 0; n < instances; ++n)
    {
        const arma::uword M = dims[n % dims.size()];
        const arma::cx_mat R = random_psd(M, rng);
        const arma::cx_mat sigma = random_psd(M, rng, 0.1);
        const double eps = 0.02 + 0.5 * uniform01(rng);

        // Pseudo-data from either hypothesis, so psi spans the transition region
        const bool active = uniform01(rng) < 0.5;
        const arma::cx_mat root = sqrt_psd(active ? arma::cx_mat(R + sigma) : sigma);
        const arma::cx_vec theta = root * complex_normal_matrix(M, 1, rng);

        const arma::cx_mat J = denoiser_jacobian(theta, R, sigma, eps);
        const arma::cx_mat J_fd = finite_difference_jacobian(
            [&](const arma::cx_vec &t) { return denoise(t, R, sigma, eps); }, theta);

        const double scale = std::max(arma::abs(J_fd).max(), 1e-300);
        out.worst_relative_error = std::max(out.worst_relative_error, arma::abs(J - J_fd).max() / scale);
        ++out.instances;
    }
    return out;
}

juice::validation::QuadformCheck juice::validation::check_quadform_cdf(arma::uword instances,
                                                                      const std::vector<arma::uword> &dims,
                                                                      arma::uword cdf_samples,
                                                                      arma::uword mean_samples, Rng &rng,
                                                                      double exponent_constant)
{
    QuadformCheck out;
    for (arma::uword n = 0; n < instances; ++n)
    {
        const arma::uword M = dims[n % dims.size()];
        const arma::cx_mat R = random_spread_psd(M, rng, 0.05, 5.0);
        const arma::cx_mat sigma = random_spread_psd(M, rng, 0.1, 1.0);
        const arma::cx_mat xi = xi_matrix(R, sigma);
        const arma::cx_mat C = hypothesis_cov(R, sigma, n % 2 == 0 ? Hypothesis::active : Hypothesis::inactive);

        const QuadFormSpectrum spectrum = quadform_spectrum(C, xi);
        const arma::vec samples = sample_quadform(C, xi, cdf_samples, rng);
        const double d = sup_distance([&](double a) { return quadform_cdf(spectrum, a, exponent_constant); },
                                      samples);
        out.worst_sup_distance = std::max(out.worst_sup_distance, d);

        const double expected = std::real(arma::trace(xi * C));
        const double mean = arma::mean(sample_quadform(C, xi, mean_samples, rng));
        out.worst_mean_error = std::max(out.worst_mean_error, std::abs(mean - expected) / expected);
        ++out.instances;
    }
    return out;
}

bool juice::validation::run_validation(std::uint64_t seed, std::ostream &out)
{
    bool all = true;
    auto report = [&](const char *name, bool pass, double value, double limit)
    {
        out << (pass ? "PASS " : "FAIL ") << name << ": " << value << " (limit " << limit << ")\n";
        all = all && pass;
    };

    {
        Rng rng = make_rng(seed, 1);
        JacobianCheck jc = check_denoiser_jacobian(100, {1, 2, 4}, rng);
        report("denoiser Jacobian vs finite differences (max rel. error)", jc.worst_relative_error <= 1e-5,
               jc.worst_relative_error, 1e-5);
    }
    {
        // Exponent constant of the CDF: M = 1, lambda = 1, Q ~ Exp(mean 1)
        Rng rng = make_rng(seed, 2);
        const arma::cx_mat C(1, 1, arma::fill::value(2.0));
        const arma::cx_mat xi(1, 1, arma::fill::value(0.5));
        const QuadFormSpectrum s = quadform_spectrum(C, xi);
        const arma::vec samples = sample_quadform(C, xi, 1000000, rng);
        const double d = sup_distance([&](double a) { return quadform_cdf(s, a); }, samples);
        report("quadratic-form CDF exponent constant (sup distance, M = 1)", d <= 0.005, d, 0.005);
    }
    {
        Rng rng = make_rng(seed, 3);
        QuadformCheck qc = check_quadform_cdf(20, {1, 2, 4, 8}, 100000, 1000000, rng, quadform_exponent_constant);
        report("quadratic-form CDF vs Monte Carlo (sup distance)", qc.worst_sup_distance <= 0.01,
               qc.worst_sup_distance, 0.01);
        report("quadratic-form mean identity (relative error)", qc.worst_mean_error <= 0.01, qc.worst_mean_error,
               0.01);
    }
    return all;
}
