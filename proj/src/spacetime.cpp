#include "netmod/spacetime.hpp"

#include <algorithm>
#include <cmath>

#include "netmod/errors.hpp"
#include "netmod/exact2.hpp"

namespace netmod {

namespace {

// Columns of blkdiag(m, copies) selected by index, assembled densely. Column
// index b*m.cols()+c of the block stack is e_b (x) m[:, c].
Mat gather_block_cols(const Mat& m, int copies, const std::vector<int>& sel) {
    Mat out = Mat::zeros(m.rows() * copies, static_cast<int>(sel.size()));
    for (size_t j = 0; j < sel.size(); ++j) {
        const int b = sel[j] / m.cols();
        const int c = sel[j] % m.cols();
        for (int i = 0; i < m.rows(); ++i) out(b * m.rows() + i, static_cast<int>(j)) = m(i, c);
    }
    return out;
}

// x * blkdiag(w, ..., w) with as many copies of w as x's width allows.
Mat times_block_diag(const Mat& x, const Mat& w) {
    if (x.cols() % w.rows() != 0) throw DimMismatch("block width does not divide");
    const int nb = x.cols() / w.rows();
    Mat out = Mat::zeros(x.rows(), nb * w.cols());
    for (int b = 0; b < nb; ++b)
        for (int c = 0; c < w.cols(); ++c)
            for (int r = 0; r < w.rows(); ++r) {
                const cplx f = w(r, c);
                if (f == cplx(0.0)) continue;
                for (int i = 0; i < x.rows(); ++i)
                    out(i, b * w.cols() + c) += x(i, b * w.rows() + r) * f;
            }
    return out;
}

void require_unit_dets(const std::vector<Mat>& a_list, const char* who) {
    for (const Mat& a : a_list) {
        if (a.rows() != a.cols()) throw InvalidDims(std::string(who) + ": matrices must be square");
        if (std::abs(std::abs(det(a)) - 1.0) > 1e-8)
            throw DeterminantNotUnit(std::string(who) + ": |det| must equal one");
    }
}

// Shared tail of every space-time construction: given per-user factors with a
// common triangular diagonal d (user factors u_list, shared right factor v,
// all with m columns), spread them over n2 copies and flatten the diagonal
// with one more joint rotation. The reordered block stack is block-upper-
// triangular with diagonal blocks diag(reverse d), so flattening that small
// diagonal flattens the whole retained system.
SpaceTimeDecomp flatten_over_blocks(const std::vector<Mat>& a_list,
                                    const std::vector<Mat>& u_list, const Mat& v,
                                    const std::vector<double>& d, int n2,
                                    const Tolerances& tol) {
    const int m = static_cast<int>(d.size());
    const int n = a_list.front().rows();
    std::vector<int> pi = reorder_map(m, n2);

    std::vector<double> d_rev(d.rbegin(), d.rend());
    GmdResult gq = gmd(Mat::diag_real(d_rev), tol);

    SpaceTimeDecomp out;
    out.U_list.reserve(a_list.size());
    for (const Mat& u : u_list)
        out.U_list.push_back(times_block_diag(gather_block_cols(u, n2, pi), gq.U));
    out.V = times_block_diag(gather_block_cols(v, n2, pi), gq.V);

    out.blocks = (u_list.front().rows() / n) * n2;
    out.retained = static_cast<int>(pi.size());
    out.dropped = n * out.blocks - out.retained;
    out.diag_constant = gq.lambda;
    out.T_list.reserve(a_list.size());
    for (size_t i = 0; i < a_list.size(); ++i)
        out.T_list.push_back(adjoint(out.U_list[i]) * block_apply(a_list[i], out.V));
    return out;
}

}  // namespace

std::vector<int> reorder_map(int n, int N) {
    if (n < 1 || N < n) throw InvalidParams("reorder_map: need N >= n >= 1");
    const int len = n * (N - n + 1);
    std::vector<int> pi(len);
    for (int j = 0; j < len; ++j) pi[j] = (n - 1) * (j % n) + n * (j / n) + n - 1;
    return pi;
}

Mat realify(const Mat& m) {
    Mat out = Mat::zeros(2 * m.rows(), 2 * m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            const double re = m(i, j).real(), im = m(i, j).imag();
            out(i, j) = re;
            out(i, j + m.cols()) = -im;
            out(i + m.rows(), j) = im;
            out(i + m.rows(), j + m.cols()) = re;
        }
    return out;
}

std::vector<int> interleave_map(int m) {
    std::vector<int> idx(2 * m);
    for (int j = 0; j < m; ++j) {
        idx[2 * j] = j;
        idx[2 * j + 1] = m + j;
    }
    return idx;
}

Mat block_apply(const Mat& a, const Mat& x) {
    if (x.rows() % a.cols() != 0) throw DimMismatch("block_apply: row count does not divide");
    const int nb = x.rows() / a.cols();
    Mat out = Mat::zeros(a.rows() * nb, x.cols());
    for (int b = 0; b < nb; ++b)
        for (int i = 0; i < a.rows(); ++i)
            for (int k = 0; k < a.cols(); ++k) {
                const cplx f = a(i, k);
                if (f == cplx(0.0)) continue;
                for (int j = 0; j < x.cols(); ++j)
                    out(b * a.rows() + i, j) += f * x(b * a.cols() + k, j);
            }
    return out;
}

SpaceTimeDecomp st_2gmd(const Mat& a1, const Mat& a2, int N, const Tolerances& tol) {
    if (a1.rows() != a1.cols() || a2.rows() != a2.cols() || a1.rows() != a2.rows())
        throw InvalidDims("st_2gmd: inputs must be square and same size");
    const int n = a1.rows();
    if (N <= n - 1) throw InsufficientBlocks("st_2gmd: need N > n - 1");
    require_unit_dets({a1, a2}, "st_2gmd");

    JetResult jt = jet2(a1, a2, tol);
    std::vector<double> d;
    d.reserve(n);
    for (int k = 0; k < n; ++k) d.push_back(jt.R1(k, k).real());

    return flatten_over_blocks({a1, a2}, {jt.U1, jt.U2}, jt.V, d, N, tol);
}

SpaceTimeDecomp st_kgmd(const std::vector<Mat>& a_list, int N, const Tolerances& tol) {
    if (a_list.empty()) throw InvalidParams("st_kgmd: no matrices given");
    const int K = static_cast<int>(a_list.size());
    const int n = a_list.front().rows();
    require_unit_dets(a_list, "st_kgmd");
    for (const Mat& a : a_list)
        if (a.rows() != n) throw DimMismatch("st_kgmd: matrices must share one size");

    if (K == 1) {
        if (N < 1) throw InsufficientBlocks("st_kgmd: need at least one block");
        GmdResult g = gmd(block_extend(a_list[0], N), tol);
        SpaceTimeDecomp out;
        out.U_list = {std::move(g.U)};
        out.V = std::move(g.V);
        out.T_list = {std::move(g.T)};
        out.retained = n * N;
        out.dropped = 0;
        out.blocks = N;
        out.diag_constant = g.lambda;
        return out;
    }
    if (K == 2) return st_2gmd(a_list[0], a_list[1], N, tol);

    std::vector<Mat> ratios = build_ratio_matrices(a_list, tol);

    // Three users of 2x2 ratios that are real and jointly flattenable admit an
    // exact construction: unit-diagonal pair factorization of the ratios, a
    // square (hence lossless) lift against the reference matrix, then the
    // usual spreading. Everything stays n x n until the final spread, so the
    // diagonal constant is exactly one.
    if (K == 3 && n == 2 && N >= n && is_real(ratios[0], tol.structural) &&
        is_real(ratios[1], tol.structural)) {
        bool have_exact = false;
        Mat u1, u2, vr;
        try {
            Mat b1 = real_part(ratios[0]);
            Mat b2 = real_part(ratios[1]);
            // The pair routine wants det exactly +1; a real unit-|det| ratio
            // can sit at -1, which a fixed column flip repairs on both sides.
            const bool flip = det(b1).real() < 0.0;
            if (flip)
                for (Mat* b : {&b1, &b2})
                    for (int i = 0; i < 2; ++i) (*b)(i, 1) = -(*b)(i, 1);
            Exact2GmdResult e = exact_2gmd(b1, b2, tol);
            u1 = std::move(e.U1);
            u2 = std::move(e.U2);
            vr = std::move(e.V);
            if (flip)
                for (int i = 0; i < 2; ++i) vr(1, i) = -vr(1, i);  // V <- D V, D = diag(1,-1)
            have_exact = true;
        } catch (const Infeasible&) {
        } catch (const DegenerateEqualDiagonal&) {
        } catch (const NumericalBreakdown&) {
        }
        if (have_exact) {
            KJetResult lift =
                detail::kjet_lift_unchecked(a_list, {u1, u2}, vr, tol);
            std::vector<double> d;
            for (int k = 0; k < n; ++k) d.push_back(lift.R_list[0](k, k).real());
            return flatten_over_blocks(a_list, lift.U_list, lift.V, d, N, tol);
        }
    }

    // General route: factor the ratios recursively, lift against the last
    // matrix over however many blocks the recursion ended up using, then
    // spread wide enough that the reordering has room (the lift's triangular
    // size can exceed N).
    SpaceTimeDecomp inner = st_kgmd(ratios, N, tol);
    const int n_tot = inner.V.rows() / n;
    std::vector<Mat> ext;
    ext.reserve(a_list.size());
    for (const Mat& a : a_list) ext.push_back(block_extend(a, n_tot));
    KJetResult lift = detail::kjet_lift_unchecked(ext, inner.U_list, inner.V, tol);

    const int m = inner.retained;
    const int n2 = std::max(N, m + 1);
    std::vector<double> d;
    d.reserve(m);
    for (int k = 0; k < m; ++k) d.push_back(lift.R_list[0](k, k).real());
    return flatten_over_blocks(a_list, lift.U_list, lift.V, d, n2, tol);
}

}  // namespace netmod
