#pragma once

#include "netmod/decomp.hpp"

namespace netmod {

// What remains of a real 2x2 det-1 pair after joint triangularization with a
// shared right factor: R1 = [[r1, x1],[0, r2]], R2 = [[r1, x2],[0, r2]] with
// r1 r2 = 1. The whole exact two-user question lives in these four numbers.
struct JetResidual {
    double r1 = 0.0;
    double r2 = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
};

struct JetResidualResult {
    JetResidual residual;
    Mat U1, U2, V;  // real orthogonal factors realizing the residual form
};

// Jointly triangularizes two real 2x2 determinant-one matrices; factors are
// normalized so det(V) = +1. Throws NotReal / DeterminantNotOne on bad input.
JetResidualResult jet_residual(const Mat& a1, const Mat& a2, const Tolerances& tol = {});

// Closed-form test for whether a unit right factor can flatten both residual
// triangles to unit diagonal simultaneously. Throws DegenerateEqualDiagonal
// when r1 == r2 but x1 != x2 (the test degenerates and no verdict exists).
bool feasibility_2gmd(const JetResidual& res, const Tolerances& tol = {});

struct ResidualGmd {
    Mat W1, W2;  // 2x2 unitary left corrections
    Mat V;       // 2x2 unitary shared right factor
    cplx s1;     // top-left entry of V
    double s2;   // top-right entry of V (real by construction)
};

// Builds the shared unitary V = [[s1, s2],[conj(s2), -conj(s1)]] that turns
// both residual triangles into unit-diagonal ones: W_i† R_i V is upper
// triangular with diagonal (1, 1). Throws Infeasible when no such V exists.
ResidualGmd gmd_from_residual(const JetResidual& res, const Tolerances& tol = {});

struct Exact2GmdResult {
    Mat U1, U2;  // complex unitary left factors
    Mat V;       // complex unitary shared right factor
    cplx s1;
    double s2;
};

// Full pipeline for real 2x2 det-1 pairs: residual extraction, feasibility,
// construction, composition. A_i = U_i T_i V† with diag(T_i) = (1, 1).
Exact2GmdResult exact_2gmd(const Mat& a1, const Mat& a2, const Tolerances& tol = {});

}  // namespace netmod
