#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

#include "netmod/errors.hpp"

namespace netmod {

using cplx = std::complex<double>;

// Tolerances used throughout; every operation that judges a numerical
// predicate takes one of these (defaulted) so callers can tighten or loosen.
struct Tolerances {
    double structural = 1e-9;  // triangularity / unitarity / diagonal predicates
    double rank = 1e-12;       // relative cutoff for rank decisions
    double psd = 1e-9;         // eigenvalue clamp window for PSD inputs
};

// Dense column-addressable complex matrix, row-major storage. Small and
// boring on purpose: everything in this library is n <= a few dozen.
class Mat {
  public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), e_(check_size(rows, cols)) {}
    Mat(int rows, int cols, std::initializer_list<cplx> entries)
        : rows_(rows), cols_(cols), e_(entries) {
        if (static_cast<int>(e_.size()) != rows * cols)
            throw InvalidDims("entry count does not match rows*cols");
    }

    static Mat zeros(int rows, int cols) { return Mat(rows, cols); }
    static Mat identity(int n) {
        Mat I(n, n);
        for (int i = 0; i < n; ++i) I(i, i) = 1.0;
        return I;
    }
    static Mat diag(const std::vector<cplx>& d) {
        Mat D(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (size_t i = 0; i < d.size(); ++i) D(static_cast<int>(i), static_cast<int>(i)) = d[i];
        return D;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return e_.empty(); }
    bool square() const { return rows_ == cols_; }

    cplx& operator()(int i, int j) { return e_[static_cast<size_t>(i) * cols_ + j]; }
    const cplx& operator()(int i, int j) const { return e_[static_cast<size_t>(i) * cols_ + j]; }

    const std::vector<cplx>& entries() const { return e_; }
    std::vector<cplx>& entries() { return e_; }

  private:
    static size_t check_size(int rows, int cols) {
        if (rows < 0 || cols < 0) throw InvalidDims("negative matrix dimension");
        return static_cast<size_t>(rows) * static_cast<size_t>(cols);
    }
    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> e_;
};

// arithmetic
Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(cplx s, const Mat& a);
inline Mat operator*(double s, const Mat& a) { return cplx(s, 0.0) * a; }

// structure
Mat adjoint(const Mat& a);    // conjugate transpose
Mat transpose(const Mat& a);
Mat conjugate(const Mat& a);
Mat real_part(const Mat& a);  // real entries kept, imaginary zeroed
Mat imag_part(const Mat& a);

// norms and predicates
double fro_norm(const Mat& a);
double max_abs(const Mat& a);
double max_abs_lower(const Mat& a);          // strictly-below-diagonal magnitude
double orthonormal_error(const Mat& a);      // max |A†A - I|
bool is_real(const Mat& a, double tol);
bool is_hermitian(const Mat& a, double tol);
bool all_finite(const Mat& a);

// pieces
std::vector<cplx> diagonal(const Mat& a);
Mat take_cols(const Mat& a, const std::vector<int>& idx);
Mat take_rows(const Mat& a, const std::vector<int>& idx);
Mat hstack(const Mat& a, const Mat& b);
Mat vstack(const Mat& a, const Mat& b);
Mat submatrix(const Mat& a, int r0, int c0, int nrows, int ncols);

// linear solves (Gaussian elimination, partial pivoting)
Mat solve(const Mat& a, const Mat& b, double rank_tol = 1e-12);  // a X = b
Mat inverse(const Mat& a, double rank_tol = 1e-12);
cplx det(const Mat& a);

}  // namespace netmod
