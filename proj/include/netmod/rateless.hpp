#pragma once

#include <vector>

#include "netmod/matrix.hpp"

namespace netmod {

// Per-split gains alpha_m = sqrt(2^{R/m} - 1): after m equal-gain uses the
// accumulated mutual information of each active stream reaches R.
std::vector<double> rateless_alphas(int M, double R);

// The M nested single-rate channels H_m = alpha_m * diag(1,...,1,0,...,0)
// (m ones), all M x M, used by the rateless transmission scheme.
std::vector<Mat> build_rateless_channels(int M, double R);

// Closed-form orthogonal precoder for the two-split scheme; both streams see
// identical gains 2^{R/4}.
Mat two_rate_precoder(double R);

// Largest R for which the three-split scheme stays perfect.
double three_rate_threshold();

struct ThreeRateFeasibility {
    bool feasible = false;
    double threshold = 0.0;
};

ThreeRateFeasibility three_rate_feasible(double R);

struct ThreeRateOffdiag {
    double x = 0.0;  // coupling entry that decides feasibility via x^2 <= 4
    double z = 0.0;
    double w = 0.0;
    double u = 0.0;  // 2^{-R/12}, the repeated diagonal deviation
    Mat R1, R2;      // display triangles, scaled so det matches 2^{R/2}
};

// Closed-form joint triangularization data for the three-split channel pair.
ThreeRateOffdiag three_rate_offdiag(double R);

struct PairJet {
    Mat U1, U2, V;  // unit-diagonal joint triangularization of the det-1 pair
};

// Exact unit-diagonal joint factorization of the determinant-normalized
// three-split pair; exists iff R is at or below the threshold (Infeasible
// otherwise). Factors are real orthogonal.
PairJet three_rate_pair_jet(double R);

}  // namespace netmod
