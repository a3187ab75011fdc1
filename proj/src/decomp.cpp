#include "netmod/decomp.hpp"

#include <algorithm>
#include <cmath>

#include "netmod/errors.hpp"

namespace netmod {

namespace {

// Symmetric 2-column/row swap helpers used while steering the diagonal.
void swap_cols(Mat& m, int a, int b) {
    for (int i = 0; i < m.rows(); ++i) std::swap(m(i, a), m(i, b));
}

void swap_sym(Mat& t, int a, int b) {
    swap_cols(t, a, b);
    for (int j = 0; j < t.cols(); ++j) std::swap(t(a, j), t(b, j));
}

// Applies the 2x2 real matrix g to columns (k, k+1) from the right.
void apply_right(Mat& m, int k, double g00, double g01, double g10, double g11) {
    for (int i = 0; i < m.rows(); ++i) {
        const cplx a = m(i, k), b = m(i, k + 1);
        m(i, k) = a * g00 + b * g10;
        m(i, k + 1) = a * g01 + b * g11;
    }
}

// Applies the transpose of g to rows (k, k+1) from the left.
void apply_left_t(Mat& m, int k, double g00, double g01, double g10, double g11) {
    for (int j = 0; j < m.cols(); ++j) {
        const cplx a = m(k, j), b = m(k + 1, j);
        m(k, j) = a * g00 + b * g10;
        m(k + 1, j) = a * g01 + b * g11;
    }
}

}  // namespace

GmdResult gmd(const Mat& a, const Tolerances& tol) {
    if (a.rows() != a.cols()) throw InvalidDims("gmd needs a square matrix");
    const int n = a.rows();
    SvdResult sv = svd(a, tol);
    if (sv.sigma.front() <= 0.0 || sv.sigma.back() <= tol.rank * sv.sigma.front())
        throw Singular("gmd: matrix is numerically rank-deficient");

    double log_sum = 0.0;
    for (double s : sv.sigma) log_sum += std::log(s);
    const double lambda = std::exp(log_sum / n);

    Mat u = sv.U;
    Mat v = sv.V;
    Mat t = Mat::diag_real(sv.sigma);

    // Each sweep pins position k at lambda: bring the largest and smallest
    // remaining diagonal entries together (they straddle lambda because the
    // trailing block keeps geometric mean lambda), then rotate the pair so the
    // first entry lands exactly on lambda and the product is preserved.
    for (int k = 0; k + 1 < n; ++k) {
        int p = k, q = k;
        for (int j = k; j < n; ++j) {
            if (t(j, j).real() > t(p, p).real()) p = j;
            if (t(j, j).real() < t(q, q).real()) q = j;
        }
        if (p != k) {
            swap_sym(t, p, k);
            swap_cols(u, p, k);
            swap_cols(v, p, k);
            if (q == k) q = p;  // the minimum was displaced by the first swap
        }
        if (q != k + 1) {
            swap_sym(t, q, k + 1);
            swap_cols(u, q, k + 1);
            swap_cols(v, q, k + 1);
        }

        const double d1 = t(k, k).real();
        const double d2 = t(k + 1, k + 1).real();
        if (std::abs(d1 - d2) <= tol.structural * lambda) continue;  // already flat here

        const double denom = d1 * d1 - d2 * d2;
        const double c = std::sqrt((lambda * lambda - d2 * d2) / denom);
        const double s = std::sqrt((d1 * d1 - lambda * lambda) / denom);
        // Right rotation [[c,-s],[s,c]] and a left factor chosen so the pivot
        // becomes lambda while both factors stay orthogonal.
        const double l00 = d1 * c / lambda, l01 = -d2 * s / lambda;
        const double l10 = d2 * s / lambda, l11 = d1 * c / lambda;
        apply_right(t, k, c, -s, s, c);
        apply_left_t(t, k, l00, l01, l10, l11);
        apply_right(u, k, l00, l01, l10, l11);
        apply_right(v, k, c, -s, s, c);

        // The 2x2 block is known in closed form; overwrite to kill roundoff.
        t(k, k) = lambda;
        t(k + 1, k) = 0.0;
        t(k, k + 1) = s * c * denom / lambda;
        t(k + 1, k + 1) = d1 * d2 / lambda;
    }

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) t(i, j) = 0.0;
    for (int i = 0; i < n; ++i) t(i, i) = cplx(t(i, i).real(), 0.0);

    return {std::move(u), std::move(t), std::move(v), lambda};
}

JetResult jet2(const Mat& a1, const Mat& a2, const Tolerances& tol) {
    if (a1.rows() != a1.cols() || a2.rows() != a2.cols() || a1.rows() != a2.rows())
        throw InvalidDims("jet2 needs two square matrices of equal size");
    const cplx d1 = det(a1), d2 = det(a2);
    const double m1 = std::abs(d1), m2 = std::abs(d2);
    if (m2 <= 0.0) throw Singular("jet2: second matrix is singular");
    if (std::abs(m1 - m2) > 1e-8 * std::max({1.0, m1, m2}))
        throw DeterminantMismatch("jet2: |det| of the two matrices differ");

    // Triangularize the ratio A1 A2^{-1}; its singular values have geometric
    // mean one, so the shared diagonal of the ratio's flat factor is one and
    // both R_i inherit the same (positive) diagonal from the second lift.
    Mat ratio = a1 * inverse(a2, tol);
    GmdResult g = gmd(ratio, tol);
    RqResult rq = rq_decompose(adjoint(g.V) * a2, tol);
    Mat v = adjoint(rq.Q);
    Mat r1 = g.T * rq.R;

    return {std::move(g.U), std::move(g.V), std::move(v), std::move(r1), std::move(rq.R)};
}

std::vector<Mat> build_ratio_matrices(const std::vector<Mat>& g_list, const Tolerances& tol) {
    if (g_list.size() < 2) throw InvalidParams("need at least two matrices to form ratios");
    const Mat& last = g_list.back();
    if (last.rows() != last.cols()) throw InvalidDims("reference matrix must be square");
    Mat last_inv = inverse(last, tol);
    std::vector<Mat> ratios;
    ratios.reserve(g_list.size() - 1);
    for (size_t i = 0; i + 1 < g_list.size(); ++i) {
        if (g_list[i].rows() != last.rows() || g_list[i].cols() != last.cols())
            throw DimMismatch("all matrices must share the reference's shape");
        ratios.push_back(g_list[i] * last_inv);
    }
    return ratios;
}

namespace detail {

KJetResult kjet_lift_unchecked(const std::vector<Mat>& g_list, const std::vector<Mat>& u_list,
                               const Mat& v_gmd, const Tolerances& tol) {
    const size_t K = u_list.size();
    if (g_list.size() != K + 1) throw InvalidParams("need one more matrix than ratio factors");
    const Mat& g_ref = g_list.back();

    // Shared right factor comes from orthonormalizing G_{K+1}^{-1} V; the
    // triangular correction S folds into every user's factor.
    QrResult qs = qr_decompose(solve(g_ref, v_gmd, tol), tol);
    Mat s_inv = inverse(qs.R, tol);

    KJetResult out;
    out.U_list.reserve(K + 1);
    out.R_list.reserve(K + 1);
    Mat ref_inv = inverse(g_ref, tol);
    for (size_t i = 0; i < K; ++i) {
        Mat t_i = adjoint(u_list[i]) * (g_list[i] * ref_inv) * v_gmd;
        out.U_list.push_back(u_list[i]);
        out.R_list.push_back(t_i * s_inv);
    }
    out.U_list.push_back(v_gmd);
    out.R_list.push_back(std::move(s_inv));
    out.V = std::move(qs.Q);
    return out;
}

}  // namespace detail

KJetResult kgmd_to_kjet(const std::vector<Mat>& g_list, const std::vector<Mat>& u_list,
                        const Mat& v_gmd, const Tolerances& tol) {
    if (u_list.empty()) throw InvalidParams("kgmd_to_kjet: no ratio factors given");
    if (g_list.size() != u_list.size() + 1)
        throw InvalidParams("kgmd_to_kjet: need one more matrix than ratio factors");

    // Gate: the supplied factors must jointly triangularize the ratios with a
    // unit diagonal, otherwise the lift's equal-diagonal guarantee is void.
    const Mat& g_ref = g_list.back();
    Mat ref_inv = inverse(g_ref, tol);
    for (size_t i = 0; i < u_list.size(); ++i) {
        Mat t_i = adjoint(u_list[i]) * (g_list[i] * ref_inv) * v_gmd;
        const double scale = std::max(1.0, max_abs(t_i));
        if (max_abs_lower(t_i) > tol.structural * scale)
            throw PreconditionViolated("kgmd_to_kjet: ratio factor is not upper-triangular");
        for (int j = 0; j < t_i.cols(); ++j)
            if (std::abs(t_i(j, j) - cplx(1.0)) > 1e-6 * scale)
                throw PreconditionViolated("kgmd_to_kjet: ratio diagonal is not one");
    }
    return detail::kjet_lift_unchecked(g_list, u_list, v_gmd, tol);
}

}  // namespace netmod
