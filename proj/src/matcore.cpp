#include "netmod/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace netmod {

QrResult qr_decompose(const Mat& a, const Tolerances& tol) {
    const int m = a.rows(), n = a.cols();
    if (m < n) throw InvalidDims("qr_decompose: need rows >= cols");
    if (!all_finite(a)) throw InvalidDims("qr_decompose: non-finite entries");

    // Householder triangularization on a working copy, accumulating the
    // reflections into a full m x m factor that we trim afterwards.
    Mat r = a;
    Mat q = Mat::identity(m);
    const double scale = std::max(max_abs(a), 1e-300);

    for (int k = 0; k < n; ++k) {
        // column 2-norm below the diagonal
        double colnorm = 0.0;
        for (int i = k; i < m; ++i) colnorm += std::norm(r(i, k));
        colnorm = std::sqrt(colnorm);
        if (colnorm <= tol.rank * scale)
            throw RankDeficient("qr_decompose: column " + std::to_string(k) +
                                " numerically dependent");

        // reflector v = x + e^{i arg(x_0)} ||x|| e_0 maps x to a multiple of e_0
        std::vector<cplx> v(static_cast<size_t>(m - k));
        for (int i = k; i < m; ++i) v[static_cast<size_t>(i - k)] = r(i, k);
        const cplx x0 = v[0];
        const double ax0 = std::abs(x0);
        const cplx phase = ax0 > 0.0 ? x0 / ax0 : cplx(1.0);
        v[0] += phase * colnorm;
        double vnorm2 = 0.0;
        for (const auto& e : v) vnorm2 += std::norm(e);
        if (vnorm2 == 0.0) continue;  // column already reduced

        // apply I - 2 v v^† / (v^† v) from the left to R (cols k..) and to Q^†
        auto reflect_cols = [&](Mat& mat, int first_col) {
            for (int j = first_col; j < mat.cols(); ++j) {
                cplx dot = 0.0;
                for (int i = k; i < m; ++i) dot += std::conj(v[static_cast<size_t>(i - k)]) * mat(i, j);
                const cplx f = 2.0 * dot / vnorm2;
                for (int i = k; i < m; ++i) mat(i, j) -= f * v[static_cast<size_t>(i - k)];
            }
        };
        reflect_cols(r, k);
        reflect_cols(q, 0);  // accumulating Q^† here
    }
    q = adjoint(q);

    // force real positive diagonal of R by a diagonal phase transfer
    for (int k = 0; k < n; ++k) {
        const cplx d = r(k, k);
        const double ad = std::abs(d);
        const cplx ph = ad > 0.0 ? d / ad : cplx(1.0);
        for (int j = k; j < n; ++j) r(k, j) *= std::conj(ph);
        for (int i = 0; i < m; ++i) q(i, k) *= ph;
    }

    QrResult out;
    out.Q = submatrix(q, 0, 0, m, n);
    out.R = submatrix(r, 0, 0, n, n);
    // scrub the sub-diagonal fuzz the reflections leave behind
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) out.R(i, j) = 0.0;
    return out;
}

RqResult rq_decompose(const Mat& a, const Tolerances& tol) {
    if (!a.square()) throw InvalidDims("rq_decompose: matrix must be square");
    const int n = a.rows();

    // A = R Q falls out of the QR of (F A)† where F is the anti-identity:
    // QR((F A)†) = Q̃ Ũ  =>  A = (F Ũ† F)(F Q̃†), and F Ũ† F is upper-
    // triangular with the same positive-diagonal convention.
    Mat f(n, n);
    for (int i = 0; i < n; ++i) f(i, n - 1 - i) = 1.0;

    QrResult qr;
    try {
        qr = qr_decompose(adjoint(f * a), tol);
    } catch (const RankDeficient&) {
        throw Singular("rq_decompose: matrix is numerically singular");
    }
    RqResult out;
    out.R = f * adjoint(qr.R) * f;
    out.Q = f * adjoint(qr.Q);
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) out.R(i, j) = 0.0;
    return out;
}

SvdResult svd(const Mat& a, const Tolerances& tol) {
    if (!a.square()) throw InvalidDims("svd: matrix must be square");
    if (!all_finite(a)) throw InvalidDims("svd: non-finite entries");
    const int n = a.rows();

    // One-sided Jacobi: rotate column pairs of W = A V until all pairs are
    // orthogonal; then W's columns are U scaled by the singular values.
    Mat w = a;
    Mat v = Mat::identity(n);
    const double off_tol = 1e-14;
    const int max_sweeps = 60;
    bool converged = (n <= 1);
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        converged = true;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                // 2x2 Hermitian Gram block of columns (p, q)
                double app = 0.0, aqq = 0.0;
                cplx apq = 0.0;
                for (int i = 0; i < n; ++i) {
                    app += std::norm(w(i, p));
                    aqq += std::norm(w(i, q));
                    apq += std::conj(w(i, p)) * w(i, q);
                }
                const double aapq = std::abs(apq);
                if (aapq <= off_tol * std::sqrt(app * aqq) || aapq == 0.0) continue;
                converged = false;

                // unitary rotation diagonalizing [[app, apq],[apq*, aqq]]
                const cplx phase = apq / aapq;
                const double tau = (aqq - app) / (2.0 * aapq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int i = 0; i < n; ++i) {
                    const cplx wp = w(i, p), wq = w(i, q);
                    w(i, p) = c * wp - s * std::conj(phase) * wq;
                    w(i, q) = s * phase * wp + c * wq;
                    const cplx vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * std::conj(phase) * vq;
                    v(i, q) = s * phase * vp + c * vq;
                }
            }
        }
    }
    if (!converged) throw NoConvergence("svd: Jacobi sweeps did not converge");

    // extract sigma and U; complete columns that hit zero
    std::vector<double> sig(static_cast<size_t>(n));
    Mat u(n, n);
    for (int j = 0; j < n; ++j) {
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) nrm += std::norm(w(i, j));
        nrm = std::sqrt(nrm);
        sig[static_cast<size_t>(j)] = nrm;
        if (nrm > 0.0)
            for (int i = 0; i < n; ++i) u(i, j) = w(i, j) / nrm;
    }

    // descending order
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return sig[static_cast<size_t>(i)] > sig[static_cast<size_t>(j)];
    });
    SvdResult out;
    out.sigma.resize(static_cast<size_t>(n));
    out.U = take_cols(u, order);
    out.V = take_cols(v, order);
    for (int j = 0; j < n; ++j) out.sigma[static_cast<size_t>(j)] = sig[static_cast<size_t>(order[static_cast<size_t>(j)])];

    // Gram–Schmidt fill-in for zero singular directions so U stays unitary
    for (int j = 0; j < n; ++j) {
        if (out.sigma[static_cast<size_t>(j)] > 0.0) continue;
        for (int attempt = 0; attempt < n + 1; ++attempt) {
            Mat cand(n, 1);
            cand(attempt % n, 0) = 1.0;
            for (int k = 0; k < n; ++k) {
                if (k == j) continue;
                cplx dot = 0.0;
                for (int i = 0; i < n; ++i) dot += std::conj(out.U(i, k)) * cand(i, 0);
                for (int i = 0; i < n; ++i) cand(i, 0) -= dot * out.U(i, k);
            }
            const double nrm = fro_norm(cand);
            if (nrm > 0.5) {  // clearly independent of the kept columns
                for (int i = 0; i < n; ++i) out.U(i, j) = cand(i, 0) / nrm;
                break;
            }
        }
    }
    (void)tol;
    return out;
}

EigResult hermitian_eig(const Mat& c, const Tolerances& tol) {
    if (!c.square()) throw InvalidDims("hermitian_eig: matrix must be square");
    if (!is_hermitian(c, tol.structural))
        throw NotHermitian("hermitian_eig: input is not Hermitian at tolerance");
    const int n = c.rows();

    // Two-sided Jacobi sweeps on a working copy.
    Mat a = c;
    Mat v = Mat::identity(n);
    const double scale = std::max(max_abs(c), 1e-300);
    const int max_sweeps = 60;
    bool converged = (n <= 1);
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        converged = true;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double aapq = std::abs(apq);
                if (aapq <= 1e-15 * scale) continue;
                converged = false;
                const cplx phase = apq / aapq;
                const double app = a(p, p).real(), aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * aapq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cc = 1.0 / std::sqrt(1.0 + t * t);
                const double ss = cc * t;
                // column rotation a <- a G, then row rotation a <- G† a
                for (int i = 0; i < n; ++i) {
                    const cplx ap = a(i, p), aq = a(i, q);
                    a(i, p) = cc * ap - ss * std::conj(phase) * aq;
                    a(i, q) = ss * phase * ap + cc * aq;
                    const cplx vp = v(i, p), vq = v(i, q);
                    v(i, p) = cc * vp - ss * std::conj(phase) * vq;
                    v(i, q) = ss * phase * vp + cc * vq;
                }
                for (int j = 0; j < n; ++j) {
                    const cplx ap = a(p, j), aq = a(q, j);
                    a(p, j) = cc * ap - ss * phase * aq;
                    a(q, j) = ss * std::conj(phase) * ap + cc * aq;
                }
            }
        }
    }
    if (!converged) throw NoConvergence("hermitian_eig: Jacobi sweeps did not converge");

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });
    EigResult out;
    out.values.resize(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
        out.values[static_cast<size_t>(k)] = a(order[static_cast<size_t>(k)], order[static_cast<size_t>(k)]).real();
    out.vectors = take_cols(v, order);
    return out;
}

Mat hermitian_sqrt(const Mat& c, const Tolerances& tol) {
    EigResult eg = hermitian_eig(c, tol);
    const int n = c.rows();
    const double scale = std::max(max_abs(c), 1e-300);

    Mat s(n, n);
    for (int k = 0; k < n; ++k) {
        double lam = eg.values[static_cast<size_t>(k)];
        if (lam < -tol.psd * std::max(scale, 1.0))
            throw NotPSD("hermitian_sqrt: eigenvalue " + std::to_string(lam) +
                         " below the PSD window");
        lam = std::max(lam, 0.0);
        s(k, k) = std::sqrt(lam);
    }
    Mat root = eg.vectors * s * adjoint(eg.vectors);
    // exact Hermitian symmetrization of the rounding fuzz
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const cplx avg = 0.5 * (root(i, j) + std::conj(root(j, i)));
            root(i, j) = avg;
            root(j, i) = std::conj(avg);
        }
    return root;
}

Mat block_extend(const Mat& a, int n_copies) {
    if (n_copies < 1) throw InvalidDims("block_extend: need at least one copy");
    Mat b(a.rows() * n_copies, a.cols() * n_copies);
    for (int k = 0; k < n_copies; ++k)
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < a.cols(); ++j) b(k * a.rows() + i, k * a.cols() + j) = a(i, j);
    return b;
}

MatrixShapeReport shape_report(const Mat& a, double tol) {
    MatrixShapeReport rep;
    rep.tolerance = tol;
    rep.is_unitary_cols = orthonormal_error(a) <= tol;
    rep.is_upper_triangular = max_abs_lower(a) <= tol;
    rep.diag = diagonal(a);
    return rep;
}

}  // namespace netmod
