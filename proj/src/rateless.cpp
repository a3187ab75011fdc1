#include "netmod/rateless.hpp"

#include <cmath>

#include "netmod/errors.hpp"
#include "netmod/exact2.hpp"
#include "netmod/matcore.hpp"

namespace netmod {

std::vector<double> rateless_alphas(int M, double R) {
    if (M < 1 || R <= 0.0) throw InvalidParams("rateless_alphas: need M >= 1 and R > 0");
    std::vector<double> a(M);
    for (int m = 1; m <= M; ++m) a[m - 1] = std::sqrt(std::exp2(R / m) - 1.0);
    return a;
}

std::vector<Mat> build_rateless_channels(int M, double R) {
    std::vector<double> a = rateless_alphas(M, R);
    std::vector<Mat> h;
    h.reserve(M);
    for (int m = 1; m <= M; ++m) {
        Mat hm = Mat::zeros(M, M);
        for (int i = 0; i < m; ++i) hm(i, i) = a[m - 1];
        h.push_back(std::move(hm));
    }
    return h;
}

Mat two_rate_precoder(double R) {
    if (R <= 0.0) throw InvalidParams("two_rate_precoder: need R > 0");
    const double g = std::exp2(R / 4.0);  // per-stream gain after both uses
    const double s = std::sqrt(1.0 / (g * g + 1.0));
    return Mat{{cplx(s), cplx(s * g)}, {cplx(s * g), cplx(-s)}};
}

double three_rate_threshold() { return 6.0 * std::log2((3.0 + std::sqrt(5.0)) / 2.0); }

ThreeRateFeasibility three_rate_feasible(double R) {
    if (R <= 0.0) throw InvalidParams("three_rate_feasible: need R > 0");
    const double x = three_rate_offdiag(R).x;
    return {x * x <= 4.0 + 1e-12, three_rate_threshold()};
}

ThreeRateOffdiag three_rate_offdiag(double R) {
    if (R <= 0.0) throw InvalidParams("three_rate_offdiag: need R > 0");
    const double p6 = std::exp2(R / 6.0);
    const double u = std::exp2(-R / 12.0);

    ThreeRateOffdiag out;
    out.u = u;
    out.x = -(1.0 - 1.0 / p6) * std::sqrt(1.0 + p6 + p6 * p6);

    // Off-diagonals follow from matching column norms of the triangle to the
    // singular values of the first split channel.
    const double z_sq = std::exp2(-R / 3.0) * (p6 - 1.0) * (std::exp2(R / 3.0) - 1.0);
    out.z = std::sqrt(std::max(z_sq, 0.0));
    const double t1 = std::exp2(2.0 * R / 3.0) + 2.0 * std::exp2(-R / 3.0);
    double w_sq = t1 - 1.0 - z_sq - u * u - out.x * out.x - 1.0 / (u * u);
    if (w_sq < -1e-9 * t1) throw NumericalBreakdown("three_rate_offdiag: negative w^2");
    out.w = -std::sqrt(std::max(w_sq, 0.0));

    const double scale = p6;  // restores det 2^{R/2} split evenly across the diagonal
    out.R1 = Mat{{cplx(scale * 1.0), cplx(scale * out.z), cplx(scale * out.w)},
                 {cplx(0.0), cplx(scale * u), cplx(scale * out.x)},
                 {cplx(0.0), cplx(0.0), cplx(scale / u)}};
    out.R2 = Mat{{cplx(scale * 1.0), cplx(scale * out.z), cplx(0.0)},
                 {cplx(0.0), cplx(scale * u), cplx(0.0)},
                 {cplx(0.0), cplx(0.0), cplx(scale / u)}};
    return out;
}

PairJet three_rate_pair_jet(double R) {
    ThreeRateFeasibility f = three_rate_feasible(R);
    if (!f.feasible) throw Infeasible("three_rate_pair_jet: R is above the threshold");
    ThreeRateOffdiag d = three_rate_offdiag(R);

    const double scale = std::exp2(R / 6.0);
    Mat m1 = d.R1 * cplx(1.0 / scale);
    Mat m2 = d.R2 * cplx(1.0 / scale);
    Mat t = m1 * inverse(m2);

    // The generic flat factorization of the ratio lands on a different (and
    // here infeasible) triangle; the one we need pairs the singular values of
    // the ratio with the known triangle t by matching eigenvector bases.
    const double q = std::exp2(R / 4.0);
    Mat arat = Mat::zeros(3, 3);
    arat(0, 0) = q;
    arat(1, 1) = 1.0 / q;
    arat(2, 2) = 1.0;

    EigResult eg = hermitian_eig(adjoint(t) * t);
    // Column order of the identity sorted by the ratio's squared gains.
    Mat p = Mat::zeros(3, 3);
    p(1, 0) = 1.0;  // smallest gain 2^{-R/2}
    p(2, 1) = 1.0;  // middle gain 1
    p(0, 2) = 1.0;  // largest gain 2^{R/2}
    Mat u2 = p * adjoint(eg.vectors);
    Mat u1 = arat * u2 * inverse(t);
    if (orthonormal_error(u1) > 1e-7 || orthonormal_error(u2) > 1e-7)
        throw NumericalBreakdown("three_rate_pair_jet: factor match failed");

    Mat b2 = Mat::zeros(3, 3);
    b2(0, 0) = std::exp2(R / 12.0);
    b2(1, 1) = std::exp2(R / 12.0);
    b2(2, 2) = std::exp2(-R / 6.0);
    RqResult rq = rq_decompose(adjoint(u2) * b2);
    Mat v = adjoint(rq.Q);
    Mat r1 = t * rq.R;

    // The leading diagonal entry is already one; flatten the trailing 2x2
    // residual (u, 1/u) with coupling x to finish at unit diagonal.
    JetResidual res{r1(1, 1).real(), r1(2, 2).real(), r1(1, 2).real(), rq.R(1, 2).real()};
    ResidualGmd g = gmd_from_residual(res);
    auto embed = [](const Mat& w) {
        Mat e = Mat::identity(3);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) e(1 + i, 1 + j) = w(i, j);
        return e;
    };
    PairJet out;
    out.U1 = u1 * embed(g.W1);
    out.U2 = u2 * embed(g.W2);
    out.V = v * embed(g.V);
    return out;
}

}  // namespace netmod
