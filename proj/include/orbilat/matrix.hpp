#pragma once

// Dense matrices and vectors over a truncated local field.  Elimination
// pivots on minimal valuation, which keeps every division exact in the DVR
// sense; singularity is always "at working precision".

#include <vector>

#include "orbilat/local_ring.hpp"

namespace orbilat {

using Vec = std::vector<RingElem>;

struct Mat {
    int rows = 0, cols = 0;
    std::vector<RingElem> a;

    Mat() = default;
    Mat(int r, int c, const RingElem& fill) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, fill) {}

    RingElem& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const RingElem& at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

Mat mat_zero(const RingPtr& R, int r, int c);
Mat mat_identity(const RingPtr& R, int n);
Mat mat_add(const Mat& A, const Mat& B);
Mat mat_sub(const Mat& A, const Mat& B);
Mat mat_neg(const Mat& A);
Mat mat_mul(const Mat& A, const Mat& B);
Mat mat_scalar_mul(const RingElem& c, const Mat& A);
Mat mat_transpose(const Mat& A);
Mat mat_sigma(const Mat& A);          // entrywise Galois conjugation
Mat mat_pow(const Mat& A, int k);     // k >= 0
Vec mat_apply(const Mat& A, const Vec& v);
Vec vec_add(const Vec& a, const Vec& b);
Vec vec_sub(const Vec& a, const Vec& b);
Vec vec_scalar_mul(const RingElem& c, const Vec& v);
Vec vec_sigma(const Vec& v);
bool mat_equal(const Mat& A, const Mat& B);
bool vec_equal(const Vec& a, const Vec& b);
Mat mat_from_cols(const RingPtr& R, const std::vector<Vec>& cols);
Vec mat_col(const Mat& A, int j);

RingElem mat_det(const Mat& A);                 // Gauss with valuation pivoting
Mat mat_inverse(const Mat& A);                  // throws PrecisionError if singular at precision
Vec mat_solve(const Mat& A, const Vec& b);      // A x = b, A square invertible

// coefficients of det(t*I - A), little-endian, degree n monic.
// Cofactor expansion; fine for the small ranks used here.
std::vector<RingElem> charpoly(const Mat& A);

// evaluate a little-endian polynomial at a matrix / scalar
Mat poly_eval_mat(const std::vector<RingElem>& poly, const Mat& A);
RingElem poly_eval(const std::vector<RingElem>& poly, const RingElem& x);
std::vector<RingElem> poly_mul(const std::vector<RingElem>& f, const std::vector<RingElem>& g);

}  // namespace orbilat
