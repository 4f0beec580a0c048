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

#include "juice/matrix_core.hpp"
#include "juice/errors.hpp"

#include <cmath>
#include <string>

arma::cx_mat juice::hermitian_part(const arma::cx_mat &A)
{
    return 0.5 * (A + A.t());
}

void juice::require_square_finite(const arma::cx_mat &A, const char *what)
{
    if (A.n_rows == 0 || A.n_rows != A.n_cols)
        throw InputError(std::string(what) + ": matrix must be square and non-empty.");
    if (!A.is_finite())
        throw InputError(std::string(what) + ": matrix has non-finite entries.");
}

juice::HermitianSpectrum juice::eig_hermitian(const arma::cx_mat &A)
{
    require_square_finite(A, "eig_hermitian");

    arma::vec values;
    arma::cx_mat vectors;
    if (!arma::eig_sym(values, vectors, hermitian_part(A)))
        throw InputError("eig_hermitian: eigendecomposition failed.");

    // LAPACK returns ascending order
    return {arma::reverse(values), arma::fliplr(vectors)};
}

arma::cx_mat juice::sqrt_psd(const arma::cx_mat &A)
{
    HermitianSpectrum spec = eig_hermitian(A);
    const double lambda_max = spec.eigenvalues.n_elem ? spec.eigenvalues(0) : 0.0;
    const double floor = -std::max(1e-8 * lambda_max, 1e-10);

    arma::vec root(spec.eigenvalues.n_elem);
    for (arma::uword i = 0; i < root.n_elem; ++i)
    {
        double v = spec.eigenvalues(i);
        if (v < floor)
            throw NotPsdError("sqrt_psd: matrix has eigenvalue " + std::to_string(v) + " below the PSD tolerance.");
        root(i) = v > 0.0 ? std::sqrt(v) : 0.0;
    }

    const arma::cx_mat &U = spec.eigenvectors;
    arma::cx_mat S = U * arma::diagmat(arma::conv_to<arma::cx_vec>::from(root)) * U.t();
    return hermitian_part(S);
}

double juice::logdet_psd(const arma::cx_mat &A)
{
    return PsdFactor(A).logdet();
}

arma::cx_mat juice::solve_psd(const arma::cx_mat &A, const arma::cx_mat &B)
{
    if (B.n_rows != A.n_rows)
        throw InputError("solve_psd: right-hand side has incompatible row count.");
    return PsdFactor(A).solve(B);
}

double juice::invert_psd(const arma::cx_mat &A, arma::cx_mat &inverse)
{
    if (A.n_rows == 0 || A.n_rows != A.n_cols)
        throw InputError("invert_psd: matrix must be square and non-empty.");
    inverse = A;
    char uplo = 'L';
    arma::blas_int n = arma::blas_int(A.n_rows);
    arma::blas_int info = 0;
    arma::lapack::potrf(&uplo, &n, inverse.memptr(), &n, &info);
    if (info != 0)
        throw SingularError("matrix is not Hermitian positive definite.");

    double acc = 0.0;
    for (arma::uword i = 0; i < A.n_rows; ++i)
        acc += std::log(inverse(i, i).real());

    arma::lapack::potri(&uplo, &n, inverse.memptr(), &n, &info);
    if (info != 0)
        throw SingularError("matrix is not Hermitian positive definite.");

    // potri leaves the strict upper triangle untouched
    for (arma::uword j = 0; j < A.n_cols; ++j)
    {
        inverse(j, j) = inverse(j, j).real();
        for (arma::uword i = j + 1; i < A.n_rows; ++i)
            inverse(j, i) = std::conj(inverse(i, j));
    }
    return 2.0 * acc;
}

juice::PsdFactor::PsdFactor(const arma::cx_mat &A)
{
    require_square_finite(A, "PsdFactor");
    if (!arma::chol(lower_, hermitian_part(A), "lower"))
        throw SingularError("matrix is not Hermitian positive definite.");

    double acc = 0.0;
    for (arma::uword i = 0; i < lower_.n_rows; ++i)
    {
        double d = lower_(i, i).real();
        if (!(d > 0.0))
            throw SingularError("matrix is not Hermitian positive definite.");
        acc += std::log(d);
    }
    logdet_ = 2.0 * acc;
}

arma::cx_mat juice::PsdFactor::solve(const arma::cx_mat &B) const
{
    if (B.n_rows != lower_.n_rows)
        throw InputError("PsdFactor::solve: right-hand side has incompatible row count.");
    arma::cx_mat tmp = arma::solve(arma::trimatl(lower_), B, arma::solve_opts::fast);
    return arma::solve(arma::trimatu(lower_.t()), tmp, arma::solve_opts::fast);
}

arma::cx_vec juice::PsdFactor::solve(const arma::cx_vec &b) const
{
    if (b.n_rows != lower_.n_rows)
        throw InputError("PsdFactor::solve: right-hand side has incompatible row count.");
    arma::cx_vec tmp = arma::solve(arma::trimatl(lower_), b, arma::solve_opts::fast);
    return arma::solve(arma::trimatu(lower_.t()), tmp, arma::solve_opts::fast);
}

arma::cx_mat juice::PsdFactor::inverse() const
{
    arma::cx_mat out = lower_;
    char uplo = 'L';
    arma::blas_int n = arma::blas_int(lower_.n_rows);
    arma::blas_int info = 0;
    arma::lapack::potri(&uplo, &n, out.memptr(), &n, &info);
    if (info != 0)
        throw SingularError("PsdFactor::inverse: factor is singular.");
    for (arma::uword j = 0; j < out.n_cols; ++j)
    {
        out(j, j) = out(j, j).real();
        for (arma::uword i = j + 1; i < out.n_rows; ++i)
            out(j, i) = std::conj(out(i, j));
    }
    return out;
}

double juice::PsdFactor::inverse_quadratic(const arma::cx_vec &x) const
{
    arma::cx_vec tmp = arma::solve(arma::trimatl(lower_), x, arma::solve_opts::fast);
    return arma::accu(arma::square(arma::abs(tmp)));
}
