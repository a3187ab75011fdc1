#include "netmod/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace netmod {

namespace {

void require_same_shape(const Mat& a, const Mat& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimMismatch(std::string(op) + ": shapes differ");
}

}  // namespace

Mat operator+(const Mat& a, const Mat& b) {
    require_same_shape(a, b, "add");
    Mat c = a;
    for (size_t i = 0; i < c.entries().size(); ++i) c.entries()[i] += b.entries()[i];
    return c;
}

Mat operator-(const Mat& a, const Mat& b) {
    require_same_shape(a, b, "sub");
    Mat c = a;
    for (size_t i = 0; i < c.entries().size(); ++i) c.entries()[i] -= b.entries()[i];
    return c;
}

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw DimMismatch("mul: inner dimensions differ");
    Mat c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx(0.0)) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Mat operator*(cplx s, const Mat& a) {
    Mat c = a;
    for (auto& e : c.entries()) e *= s;
    return c;
}

Mat adjoint(const Mat& a) {
    Mat c(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(j, i) = std::conj(a(i, j));
    return c;
}

Mat transpose(const Mat& a) {
    Mat c(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(j, i) = a(i, j);
    return c;
}

Mat conjugate(const Mat& a) {
    Mat c = a;
    for (auto& e : c.entries()) e = std::conj(e);
    return c;
}

Mat real_part(const Mat& a) {
    Mat c = a;
    for (auto& e : c.entries()) e = cplx(e.real(), 0.0);
    return c;
}

Mat imag_part(const Mat& a) {
    Mat c = a;
    for (auto& e : c.entries()) e = cplx(e.imag(), 0.0);
    return c;
}

double fro_norm(const Mat& a) {
    double s = 0.0;
    for (const auto& e : a.entries()) s += std::norm(e);
    return std::sqrt(s);
}

double max_abs(const Mat& a) {
    double m = 0.0;
    for (const auto& e : a.entries()) m = std::max(m, std::abs(e));
    return m;
}

double max_abs_lower(const Mat& a) {
    double m = 0.0;
    for (int i = 1; i < a.rows(); ++i)
        for (int j = 0; j < std::min(i, a.cols()); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

double orthonormal_error(const Mat& a) {
    const Mat g = adjoint(a) * a;
    double m = 0.0;
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j)
            m = std::max(m, std::abs(g(i, j) - (i == j ? cplx(1.0) : cplx(0.0))));
    return m;
}

bool is_real(const Mat& a, double tol) {
    for (const auto& e : a.entries())
        if (std::abs(e.imag()) > tol) return false;
    return true;
}

bool is_hermitian(const Mat& a, double tol) {
    if (!a.square()) return false;
    const double scale = std::max(1.0, max_abs(a));
    for (int i = 0; i < a.rows(); ++i)
        for (int j = i; j < a.cols(); ++j)
            if (std::abs(a(i, j) - std::conj(a(j, i))) > tol * scale) return false;
    return true;
}

bool all_finite(const Mat& a) {
    for (const auto& e : a.entries())
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
    return true;
}

std::vector<cplx> diagonal(const Mat& a) {
    std::vector<cplx> d(static_cast<size_t>(std::min(a.rows(), a.cols())));
    for (size_t i = 0; i < d.size(); ++i) d[i] = a(static_cast<int>(i), static_cast<int>(i));
    return d;
}

Mat take_cols(const Mat& a, const std::vector<int>& idx) {
    Mat c(a.rows(), static_cast<int>(idx.size()));
    for (int j = 0; j < c.cols(); ++j) {
        const int src = idx[static_cast<size_t>(j)];
        if (src < 0 || src >= a.cols()) throw InvalidDims("take_cols: index out of range");
        for (int i = 0; i < a.rows(); ++i) c(i, j) = a(i, src);
    }
    return c;
}

Mat take_rows(const Mat& a, const std::vector<int>& idx) {
    Mat c(static_cast<int>(idx.size()), a.cols());
    for (int i = 0; i < c.rows(); ++i) {
        const int src = idx[static_cast<size_t>(i)];
        if (src < 0 || src >= a.rows()) throw InvalidDims("take_rows: index out of range");
        for (int j = 0; j < a.cols(); ++j) c(i, j) = a(src, j);
    }
    return c;
}

Mat hstack(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) throw DimMismatch("hstack: row counts differ");
    Mat c(a.rows(), a.cols() + b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
        for (int j = 0; j < b.cols(); ++j) c(i, a.cols() + j) = b(i, j);
    }
    return c;
}

Mat vstack(const Mat& a, const Mat& b) {
    if (a.cols() != b.cols()) throw DimMismatch("vstack: column counts differ");
    Mat c(a.rows() + b.rows(), a.cols());
    for (int j = 0; j < a.cols(); ++j) {
        for (int i = 0; i < a.rows(); ++i) c(i, j) = a(i, j);
        for (int i = 0; i < b.rows(); ++i) c(a.rows() + i, j) = b(i, j);
    }
    return c;
}

Mat submatrix(const Mat& a, int r0, int c0, int nrows, int ncols) {
    if (r0 < 0 || c0 < 0 || r0 + nrows > a.rows() || c0 + ncols > a.cols())
        throw InvalidDims("submatrix: block out of range");
    Mat c(nrows, ncols);
    for (int i = 0; i < nrows; ++i)
        for (int j = 0; j < ncols; ++j) c(i, j) = a(r0 + i, c0 + j);
    return c;
}

// LU with partial pivoting, shared by solve/inverse/det. Returns the pivoted
// factors in place; perm_sign reports the permutation parity for det.
namespace {

struct Lu {
    Mat lu;
    std::vector<int> perm;
    int sign = 1;
    bool singular = false;
    double max_pivot = 0.0;
    double min_pivot = 0.0;
};

Lu lu_factor(const Mat& a) {
    if (!a.square()) throw InvalidDims("lu: matrix must be square");
    const int n = a.rows();
    Lu f{a, std::vector<int>(static_cast<size_t>(n)), 1, false, 0.0, 0.0};
    for (int i = 0; i < n; ++i) f.perm[static_cast<size_t>(i)] = i;
    double maxp = 0.0, minp = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(f.lu(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(f.lu(i, k));
            if (v > best) { best = v; piv = i; }
        }
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
            std::swap(f.perm[static_cast<size_t>(k)], f.perm[static_cast<size_t>(piv)]);
            f.sign = -f.sign;
        }
        const cplx p = f.lu(k, k);
        const double ap = std::abs(p);
        maxp = std::max(maxp, ap);
        minp = std::min(minp, ap);
        if (ap == 0.0) { f.singular = true; break; }
        for (int i = k + 1; i < n; ++i) {
            const cplx m = f.lu(i, k) / p;
            f.lu(i, k) = m;
            for (int j = k + 1; j < n; ++j) f.lu(i, j) -= m * f.lu(k, j);
        }
    }
    f.max_pivot = maxp;
    f.min_pivot = std::isfinite(minp) ? minp : 0.0;
    return f;
}

}  // namespace

Mat solve(const Mat& a, const Mat& b, double rank_tol) {
    if (a.rows() != b.rows()) throw DimMismatch("solve: row counts differ");
    const Lu f = lu_factor(a);
    if (f.singular || f.min_pivot <= rank_tol * std::max(f.max_pivot, 1e-300))
        throw Singular("solve: matrix is numerically singular");
    const int n = a.rows();
    Mat x(n, b.cols());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < b.cols(); ++j) x(i, j) = b(f.perm[static_cast<size_t>(i)], j);
    // forward substitution (unit lower factor)
    for (int k = 0; k < n; ++k)
        for (int i = k + 1; i < n; ++i)
            for (int j = 0; j < b.cols(); ++j) x(i, j) -= f.lu(i, k) * x(k, j);
    // back substitution
    for (int k = n - 1; k >= 0; --k) {
        for (int j = 0; j < b.cols(); ++j) x(k, j) /= f.lu(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < b.cols(); ++j) x(i, j) -= f.lu(i, k) * x(k, j);
    }
    return x;
}

Mat inverse(const Mat& a, double rank_tol) {
    return solve(a, Mat::identity(a.rows()), rank_tol);
}

cplx det(const Mat& a) {
    const Lu f = lu_factor(a);
    if (f.singular) return 0.0;
    cplx d = static_cast<double>(f.sign);
    for (int k = 0; k < a.rows(); ++k) d *= f.lu(k, k);
    return d;
}

}  // namespace netmod
