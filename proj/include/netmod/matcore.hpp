#pragma once

#include "netmod/matrix.hpp"

namespace netmod {

struct QrResult {
    Mat Q;  // m x n, orthonormal columns
    Mat R;  // n x n upper-triangular, strictly positive real diagonal
};

// Thin QR of an m x n matrix (m >= n) with the positive-diagonal sign
// convention, which the determinant bookkeeping downstream relies on.
// Throws RankDeficient when a column collapses below tol.rank relative.
QrResult qr_decompose(const Mat& a, const Tolerances& tol = {});

struct RqResult {
    Mat R;  // upper-triangular, positive real diagonal
    Mat Q;  // unitary
};

// A = R Q for square invertible A. Throws Singular.
RqResult rq_decompose(const Mat& a, const Tolerances& tol = {});

struct SvdResult {
    Mat U;                      // unitary
    std::vector<double> sigma;  // descending, non-negative
    Mat V;                      // unitary
};

// Full SVD of a square matrix via one-sided Jacobi sweeps.
// Throws NoConvergence if the sweep budget is exhausted.
SvdResult svd(const Mat& a, const Tolerances& tol = {});

struct EigResult {
    std::vector<double> values;  // ascending
    Mat vectors;                 // unitary; c = vectors * diag(values) * vectors†
};

// Eigendecomposition of a Hermitian matrix via two-sided Jacobi sweeps.
EigResult hermitian_eig(const Mat& c, const Tolerances& tol = {});

// Principal Hermitian square root of a Hermitian PSD matrix. Eigenvalues in
// [-tol.psd, 0] are clamped to zero; below that window throws NotPSD.
Mat hermitian_sqrt(const Mat& c, const Tolerances& tol = {});

// blkdiag(A, ..., A) with N copies.
Mat block_extend(const Mat& a, int n_copies);

struct MatrixShapeReport {
    bool is_unitary_cols = false;
    bool is_upper_triangular = false;
    std::vector<cplx> diag;
    double tolerance = 0.0;
};

MatrixShapeReport shape_report(const Mat& a, double tol);

}  // namespace netmod
