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

namespace juice
{
    // Eigenpairs of a Hermitian matrix, eigenvalues sorted in descending order
    struct HermitianSpectrum
    {
        arma::vec eigenvalues;
        arma::cx_mat eigenvectors; // Columns are the eigenvectors (unitary)
    };

    // (A + A^H) / 2
    arma::cx_mat hermitian_part(const arma::cx_mat &A);

    // Throws InputError on empty, non-square or non-finite input
    void require_square_finite(const arma::cx_mat &A, const char *what);

    // Eigendecomposition of the Hermitian part of A
    HermitianSpectrum eig_hermitian(const arma::cx_mat &A);

    // Hermitian PSD square root S with S * S = A.
    // Eigenvalues in [-max(1e-8 * lambda_max, 1e-10), 0) are clamped to zero; anything more negative
    // raises NotPsdError.
    arma::cx_mat sqrt_psd(const arma::cx_mat &A);

    // Natural log-determinant of a Hermitian positive-definite matrix. Throws SingularError otherwise.
    double logdet_psd(const arma::cx_mat &A);

    // Solves A * X = B for Hermitian positive-definite A without forming the inverse
    arma::cx_mat solve_psd(const arma::cx_mat &A, const arma::cx_mat &B);

    // Writes A^{-1} into `inverse` (buffer reused when already sized) and returns log|A|.
    // Only the lower triangle of A is referenced; throws SingularError unless A is positive definite.
    double invert_psd(const arma::cx_mat &A, arma::cx_mat &inverse);

    // Cholesky factorization of a Hermitian positive-definite matrix, reusable for several solves.
    class PsdFactor
    {
    public:
        explicit PsdFactor(const arma::cx_mat &A);

        arma::uword size() const { return lower_.n_rows; }
        double logdet() const { return logdet_; }

        arma::cx_mat solve(const arma::cx_mat &B) const;
        arma::cx_vec solve(const arma::cx_vec &b) const;

        // A^{-1}, Hermitian by construction
        arma::cx_mat inverse() const;

        // Real part of x^H A^{-1} x
        double inverse_quadratic(const arma::cx_vec &x) const;

    private:
        arma::cx_mat lower_;
        double logdet_ = 0.0;
    };
}
