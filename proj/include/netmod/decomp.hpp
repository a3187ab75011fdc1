#pragma once

#include <vector>

#include "netmod/matcore.hpp"

namespace netmod {

struct GmdResult {
    Mat U;          // unitary
    Mat T;          // upper-triangular, diagonal flat at lambda
    Mat V;          // unitary
    double lambda;  // geometric mean of the singular values
};

// A = U T V† with every diagonal entry of T equal to the geometric mean of
// A's singular values. Throws Singular for rank-deficient input.
GmdResult gmd(const Mat& a, const Tolerances& tol = {});

struct JetResult {
    Mat U1, U2;  // per-matrix left unitaries
    Mat V;       // shared right unitary
    Mat R1, R2;  // upper-triangular with identical real positive diagonals
};

// Joint triangularization of two equal-|det| matrices with a shared right
// factor and matching diagonals: A_i = U_i R_i V†.
JetResult jet2(const Mat& a1, const Mat& a2, const Tolerances& tol = {});

struct KJetResult {
    std::vector<Mat> U_list;  // K+1 left factors (orthonormal columns)
    Mat V;                    // shared right factor
    std::vector<Mat> R_list;  // K+1 upper-triangulars, equal diagonals
};

// Converts a joint unit-diagonal triangularization of the ratio matrices
// G_i G_{K+1}^{-1} (left factors u_list, shared right factor v_gmd) into a
// joint equal-diagonal triangularization of all K+1 matrices themselves.
// u_list holds the K ratio left factors; v_gmd plays the (K+1)-th one.
// Throws PreconditionViolated when the claimed unit-diagonal triangular
// structure does not hold at tolerance.
KJetResult kgmd_to_kjet(const std::vector<Mat>& g_list, const std::vector<Mat>& u_list,
                        const Mat& v_gmd, const Tolerances& tol = {});

// A_i = G_i G_{K+1}^{-1} for i = 1..K. Throws Singular.
std::vector<Mat> build_ratio_matrices(const std::vector<Mat>& g_list,
                                      const Tolerances& tol = {});

namespace detail {
// The same lift as kgmd_to_kjet but without the unit-diagonal gate; the
// nested space-time recursion feeds it factors whose diagonals are flat at a
// constant that only approaches one, which is documented behavior there.
KJetResult kjet_lift_unchecked(const std::vector<Mat>& g_list, const std::vector<Mat>& u_list,
                               const Mat& v_gmd, const Tolerances& tol);
}  // namespace detail

}  // namespace netmod
