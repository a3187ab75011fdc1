#pragma once

#include <cstdint>
#include <vector>

#include "netmod/matrix.hpp"

namespace netmod {

// log2 det(I + H Cx H†): the rate a single receiver behind H can sustain.
double mutual_info(const Mat& h, const Mat& cx, const Tolerances& tol = {});

struct AugmentResult {
    Mat G;       // n x n upper-triangular, positive diagonal; 2 log2 det(G) = mutual_info
    Mat Qtilde;  // m x n slice of the augmented orthonormal factor (receiver front-end)
};

// QR of [H sqrt(Cx); I]: the square triangular factor absorbs the channel's
// entire mutual information, which lets unequal-size channels be compared and
// jointly triangularized on a common n x n footing.
AugmentResult augment(const Mat& h, const Mat& cx, const Tolerances& tol = {});

// Scalar beta >= 0 such that mutual_info(beta * h, cx) == target_bits.
double scale_to_capacity(const Mat& h, const Mat& cx, double target_bits,
                         const Tolerances& tol = {});

enum class SchemeMode {
    two_user_exact,    // single block, lossless
    k_user_exact,      // three users, real channels, two blocks, lossless
    k_user_spacetime,  // block-extended construction, loses dropped/blocks edge streams
};

struct MulticastScheme {
    SchemeMode mode = SchemeMode::two_user_exact;
    int n = 0;         // transmit dimension
    int blocks = 1;    // channel uses consumed per transmission window
    int streams = 0;   // symbols carried per window
    double capacity = 0.0;  // common per-use mutual information

    Mat sqrt_cx;             // input shaping, n x n
    Mat V;                   // right factor, (n*blocks) x streams
    std::vector<Mat> Qtilde; // per-user front-end, m_i x n, applied per use
    std::vector<Mat> U;      // per-user left factors, (n*blocks) x streams
    std::vector<Mat> T;      // per-user triangular models, streams x streams

    // Per-stream decoding gain (worst across users; users agree exactly in
    // the two- and three-user exact modes and for K <= 3 space-time) and the
    // rate log2(r_k^2) it supports. Summed over a window these reach
    // blocks * capacity in the exact modes and fall short by the dropped
    // edge streams otherwise.
    std::vector<double> diag_gains;
    std::vector<double> stream_rates;

    std::vector<Mat> H;  // channels, kept for simulation
};

// Two users, one channel use, no rate loss. Channels must support equal
// mutual information within tol_rate (RateMismatch otherwise).
MulticastScheme build_scheme_2user(const Mat& h1, const Mat& h2, const Mat& cx,
                                   const Tolerances& tol = {}, double tol_rate = 1e-6);

// K users. K = 2 defers to the two-user scheme. Three real channels get the
// exact two-block construction when the flattening feasibility holds; all
// other cases go through the space-time route over N blocks.
MulticastScheme build_scheme_kuser(const std::vector<Mat>& h_list, const Mat& cx, int N,
                                   const Tolerances& tol = {}, double tol_rate = 1e-6);

// Symbols -> transmit stack: x = blk(sqrt_cx) V s.
Mat precode(const Mat& symbols, const MulticastScheme& scheme);

// Receive stack of user i -> effective triangular channel outputs.
Mat receiver_front(const Mat& y_stack, const MulticastScheme& scheme, int user);

struct StreamStat {
    int user = 0;
    int stream = 0;
    double r_k = 0.0;                 // modeled diagonal gain
    double rate_bits = 0.0;           // log2(r_k^2)
    double empirical_sinr = 0.0;      // least-squares estimate from the trials
    double empirical_rate_bits = 0.0; // log2(1 + empirical_sinr)
    double mse = 0.0;                 // residual variance after interference removal
};

struct SimReport {
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<StreamStat> streams;
};

// Monte-Carlo successive interference cancellation over the true channels:
// unit-variance symbols through the precoder, per-use AWGN, per-user
// front-end, genie-aided back-substitution, least-squares SINR per stream.
// Deterministic for a fixed seed regardless of thread count (honors the
// NETMOD_THREADS environment variable).
SimReport sic_simulate(const MulticastScheme& scheme, std::uint64_t trials, std::uint64_t seed);

}  // namespace netmod
