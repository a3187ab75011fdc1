#pragma once

#include <vector>

#include "netmod/decomp.hpp"

namespace netmod {

// Column order that turns a block-diagonal stack of upper-triangular factors
// into a block-upper-triangular matrix whose diagonal blocks hold the
// (reversed) triangular diagonal. Indices are 0-based, length n*(N-n+1).
std::vector<int> reorder_map(int n, int N);

struct SpaceTimeDecomp {
    std::vector<Mat> U_list;   // per-user left factors, (n*blocks) x retained
    Mat V;                     // shared right factor, (n*blocks) x retained
    std::vector<Mat> T_list;   // retained x retained upper-triangular factors
    int retained = 0;          // streams carried per block-extension window
    int dropped = 0;           // columns sacrificed to make the diagonals flat
    int blocks = 0;            // channel uses consumed by the construction
    double diag_constant = 0;  // the flat diagonal value of user 1's factor
};

// Extends two same-size |det| = 1 matrices over N channel uses and produces a
// joint triangularization with exactly unit diagonals on both factors, at the
// cost of dropping n*(n-1) of the n*N columns.
SpaceTimeDecomp st_2gmd(const Mat& a1, const Mat& a2, int N, const Tolerances& tol = {});

// K-user generalization. K = 1 is a plain flat factorization of the extended
// matrix; K = 2 defers to st_2gmd; K >= 3 triangularizes the ratios against
// the last matrix recursively, lifts, and re-flattens. Per-user diagonals are
// flat in every case; they agree across users exactly for K <= 3 and up to a
// determinant-forced constant (approaching one as N grows) for K >= 4.
SpaceTimeDecomp st_kgmd(const std::vector<Mat>& a_list, int N, const Tolerances& tol = {});

// [[Re M, -Im M], [Im M, Re M]]: the real 2rx2c image of a complex matrix.
Mat realify(const Mat& m);

// Column order (0, m, 1, m+1, ...) pairing each real part with its imaginary
// part; applied to realified factors it makes the triangular image upper
// triangular with each diagonal entry duplicated.
std::vector<int> interleave_map(int m);

// blkdiag(a, ..., a) * x without materializing the block-diagonal operator;
// x.rows() must be a multiple of a.cols().
Mat block_apply(const Mat& a, const Mat& x);

}  // namespace netmod
