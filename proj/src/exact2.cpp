#include "netmod/exact2.hpp"

#include <cmath>

#include "netmod/errors.hpp"

namespace netmod {

namespace {

constexpr double kDegenTol = 1e-9;     // r1 == r2 cutoff, relative
constexpr double kFeasSlack = 1e-10;   // slack on the feasibility inequality

Mat force_real(const Mat& m, const char* what) {
    double worst = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) worst = std::max(worst, std::abs(m(i, j).imag()));
    if (worst > 1e-9 * std::max(1.0, max_abs(m)))
        throw NumericalBreakdown(std::string(what) + ": factor picked up an imaginary part");
    return real_part(m);
}

}  // namespace

JetResidualResult jet_residual(const Mat& a1, const Mat& a2, const Tolerances& tol) {
    if (a1.rows() != 2 || a1.cols() != 2 || a2.rows() != 2 || a2.cols() != 2)
        throw InvalidDims("jet_residual: inputs must be 2x2");
    if (!is_real(a1, tol.structural) || !is_real(a2, tol.structural))
        throw NotReal("jet_residual: inputs must be real");
    for (const Mat* a : {&a1, &a2}) {
        const cplx d = det(*a);
        if (std::abs(d - cplx(1.0)) > 1e-8)
            throw DeterminantNotOne("jet_residual: determinant must equal one");
    }

    JetResult jt = jet2(a1, a2, tol);
    Mat u1 = force_real(jt.U1, "jet_residual");
    Mat u2 = force_real(jt.U2, "jet_residual");
    Mat v = force_real(jt.V, "jet_residual");
    Mat r1 = force_real(jt.R1, "jet_residual");
    Mat r2 = force_real(jt.R2, "jet_residual");

    // Normalize to det(V) = +1 so downstream sign conventions are fixed; the
    // compensating diag(1,-1) leaves the diagonals alone and flips x_i.
    if (det(v).real() < 0.0) {
        for (Mat* m : {&u1, &u2, &v}) {
            (*m)(0, 1) = -(*m)(0, 1);
            (*m)(1, 1) = -(*m)(1, 1);
        }
        r1(0, 1) = -r1(0, 1);
        r2(0, 1) = -r2(0, 1);
    }

    JetResidual res{r1(0, 0).real(), r1(1, 1).real(), r1(0, 1).real(), r2(0, 1).real()};
    if (std::abs(res.r1 * res.r2 - 1.0) > 1e-8)
        throw NumericalBreakdown("jet_residual: diagonal product drifted from one");
    return {res, std::move(u1), std::move(u2), std::move(v)};
}

bool feasibility_2gmd(const JetResidual& res, const Tolerances& tol) {
    const double r1 = res.r1, r2 = res.r2, x1 = res.x1, x2 = res.x2;
    if (r1 <= 0.0 || r2 <= 0.0) throw InvalidParams("feasibility_2gmd: diagonals must be positive");

    const double scale = std::max({1.0, std::abs(x1), std::abs(x2)});
    if (std::abs(r1 - r2) <= kDegenTol * std::max(r1, r2)) {
        // Equal diagonals force r1 = r2 = 1; the triangles coincide exactly
        // when x1 = x2 (V = I works), otherwise the inequality degenerates.
        if (std::abs(x1 - x2) <= tol.structural * scale) return true;
        throw DegenerateEqualDiagonal("feasibility_2gmd: r1 == r2 with distinct couplings");
    }

    const double mid = 0.5 * (x1 + x2);
    const double lhs = r2 * mid * mid;
    const double rhs = r2 + x1 * x2 / (r1 - r2);
    return lhs <= rhs + kFeasSlack * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

ResidualGmd gmd_from_residual(const JetResidual& res, const Tolerances& tol) {
    if (!feasibility_2gmd(res, tol)) throw Infeasible("gmd_from_residual: pair is infeasible");
    const double r1 = res.r1, r2 = res.r2, x1 = res.x1, x2 = res.x2;

    Mat v(2, 2);
    if (std::abs(r1 - r2) <= kDegenTol * std::max(r1, r2)) {
        v = Mat::identity(2);  // triangles already coincide with unit diagonal
    } else {
        const double denom = r1 * r1 - r2 * r2 + x1 * x2;
        double s2sq = (r1 * r1 - 1.0) / denom;
        if (!(std::isfinite(s2sq))) throw NumericalBreakdown("gmd_from_residual: bad |s2|^2");
        if (s2sq < -1e-9 || s2sq > 1.0 + 1e-9)
            throw NumericalBreakdown("gmd_from_residual: |s2|^2 outside [0,1]");
        s2sq = std::min(std::max(s2sq, 0.0), 1.0);

        const double mid = 0.5 * (x1 + x2);
        const double re_a = -mid * r2;
        double im_sq = (s2sq > 0.0 ? 1.0 / s2sq : 0.0) - 1.0 - re_a * re_a;
        if (s2sq == 0.0) im_sq = 0.0;  // s1 has unit modulus; phase is free, pick real
        if (im_sq < -1e-7 * std::max(1.0, re_a * re_a))
            throw NumericalBreakdown("gmd_from_residual: negative Im(alpha)^2");
        const double im_a = std::sqrt(std::max(im_sq, 0.0));

        const double s2 = std::sqrt(s2sq);
        const cplx s1 = s2sq > 0.0 ? cplx(re_a, im_a) * s2 : cplx(1.0, 0.0);
        v(0, 0) = s1;
        v(0, 1) = s2;
        v(1, 0) = s2;
        v(1, 1) = -std::conj(s1);
    }

    Mat t1{{cplx(r1), cplx(x1)}, {cplx(0.0), cplx(r2)}};
    Mat t2{{cplx(r1), cplx(x2)}, {cplx(0.0), cplx(r2)}};
    QrResult q1 = qr_decompose(t1 * v, tol);
    QrResult q2 = qr_decompose(t2 * v, tol);
    for (const QrResult* q : {&q1, &q2})
        for (int k = 0; k < 2; ++k)
            if (std::abs(q->R(k, k) - cplx(1.0)) > 1e-7)
                throw NumericalBreakdown("gmd_from_residual: constructed diagonal is not one");

    return {std::move(q1.Q), std::move(q2.Q), std::move(v), v(0, 0), v(0, 1).real()};
}

Exact2GmdResult exact_2gmd(const Mat& a1, const Mat& a2, const Tolerances& tol) {
    JetResidualResult jr = jet_residual(a1, a2, tol);
    ResidualGmd g = gmd_from_residual(jr.residual, tol);
    Exact2GmdResult out;
    out.U1 = jr.U1 * g.W1;
    out.U2 = jr.U2 * g.W2;
    out.V = jr.V * g.V;
    out.s1 = g.s1;
    out.s2 = g.s2;
    return out;
}

}  // namespace netmod
