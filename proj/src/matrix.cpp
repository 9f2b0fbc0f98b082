#include "orbilat/matrix.hpp"

#include <algorithm>

namespace orbilat {

Mat mat_zero(const RingPtr& R, int r, int c) { return Mat(r, c, R->zero()); }

Mat mat_identity(const RingPtr& R, int n) {
    Mat I = mat_zero(R, n, n);
    for (int i = 0; i < n; ++i) I.at(i, i) = R->one();
    return I;
}

Mat mat_add(const Mat& A, const Mat& B) {
    Mat C = A;
    for (std::size_t i = 0; i < C.a.size(); ++i) C.a[i] = A.a[i] + B.a[i];
    return C;
}

Mat mat_sub(const Mat& A, const Mat& B) {
    Mat C = A;
    for (std::size_t i = 0; i < C.a.size(); ++i) C.a[i] = A.a[i] - B.a[i];
    return C;
}

Mat mat_neg(const Mat& A) {
    Mat C = A;
    for (auto& x : C.a) x = -x;
    return C;
}

Mat mat_mul(const Mat& A, const Mat& B) {
    const RingPtr& R = A.a[0].ring();
    Mat C = mat_zero(R, A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            const RingElem& aik = A.at(i, k);
            if (R->is_zero(aik)) continue;
            for (int j = 0; j < B.cols; ++j)
                C.at(i, j) = C.at(i, j) + aik * B.at(k, j);
        }
    return C;
}

Mat mat_scalar_mul(const RingElem& c, const Mat& A) {
    Mat C = A;
    for (auto& x : C.a) x = c * x;
    return C;
}

Mat mat_transpose(const Mat& A) {
    Mat C(A.cols, A.rows, A.a[0]);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) C.at(j, i) = A.at(i, j);
    return C;
}

Mat mat_sigma(const Mat& A) {
    Mat C = A;
    for (auto& x : C.a) x = sigma(x);
    return C;
}

Mat mat_pow(const Mat& A, int k) {
    Mat R = mat_identity(A.a[0].ring(), A.rows);
    Mat B = A;
    while (k) {
        if (k & 1) R = mat_mul(R, B);
        k >>= 1;
        if (k) B = mat_mul(B, B);
    }
    return R;
}

Vec mat_apply(const Mat& A, const Vec& v) {
    const RingPtr& R = A.a[0].ring();
    Vec out(A.rows, R->zero());
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) out[i] = out[i] + A.at(i, j) * v[j];
    return out;
}

Vec vec_add(const Vec& a, const Vec& b) {
    Vec c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

Vec vec_sub(const Vec& a, const Vec& b) {
    Vec c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] - b[i];
    return c;
}

Vec vec_scalar_mul(const RingElem& c, const Vec& v) {
    Vec o = v;
    for (auto& x : o) x = c * x;
    return o;
}

Vec vec_sigma(const Vec& v) {
    Vec o = v;
    for (auto& x : o) x = sigma(x);
    return o;
}

bool mat_equal(const Mat& A, const Mat& B) {
    if (A.rows != B.rows || A.cols != B.cols) return false;
    for (std::size_t i = 0; i < A.a.size(); ++i)
        if (A.a[i] != B.a[i]) return false;
    return true;
}

bool vec_equal(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

Mat mat_from_cols(const RingPtr& R, const std::vector<Vec>& cols) {
    int n = static_cast<int>(cols.empty() ? 0 : cols[0].size());
    Mat A = mat_zero(R, n, static_cast<int>(cols.size()));
    for (int j = 0; j < A.cols; ++j)
        for (int i = 0; i < n; ++i) A.at(i, j) = cols[j][i];
    return A;
}

Vec mat_col(const Mat& A, int j) {
    Vec v;
    v.reserve(A.rows);
    for (int i = 0; i < A.rows; ++i) v.push_back(A.at(i, j));
    return v;
}

namespace {

// shared elimination core: returns determinant; if inv != nullptr it must be
// the identity on entry and receives A^{-1}
RingElem gauss(Mat A, Mat* inv) {
    const RingPtr& R = A.a[0].ring();
    int n = A.rows;
    RingElem det = R->one();
    int sign = 1;
    for (int col = 0; col < n; ++col) {
        int piv = -1, best = kValInf;
        for (int i = col; i < n; ++i) {
            int v = R->valuation(A.at(i, col));
            if (v < best) { best = v; piv = i; }
        }
        if (piv < 0 || best >= kValInf)
            throw PrecisionError("matrix is singular at working precision");
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(A.at(piv, j), A.at(col, j));
                if (inv) std::swap(inv->at(piv, j), inv->at(col, j));
            }
            sign = -sign;
        }
        RingElem p = A.at(col, col);
        det = det * p;
        RingElem pinv = R->inverse(p);
        for (int j = 0; j < n; ++j) {
            A.at(col, j) = pinv * A.at(col, j);
            if (inv) inv->at(col, j) = pinv * inv->at(col, j);
        }
        for (int i = 0; i < n; ++i) {
            if (i == col) continue;
            RingElem f = A.at(i, col);
            if (R->is_zero(f)) continue;
            for (int j = 0; j < n; ++j) {
                A.at(i, j) = A.at(i, j) - f * A.at(col, j);
                if (inv) inv->at(i, j) = inv->at(i, j) - f * inv->at(col, j);
            }
        }
    }
    if (sign < 0) det = -det;
    return det;
}

}  // namespace

RingElem mat_det(const Mat& A) { return gauss(A, nullptr); }

Mat mat_inverse(const Mat& A) {
    Mat inv = mat_identity(A.a[0].ring(), A.rows);
    gauss(A, &inv);
    return inv;
}

Vec mat_solve(const Mat& A, const Vec& b) {
    return mat_apply(mat_inverse(A), b);
}

std::vector<RingElem> poly_mul(const std::vector<RingElem>& f, const std::vector<RingElem>& g) {
    const RingPtr& R = f[0].ring();
    std::vector<RingElem> h(f.size() + g.size() - 1, R->zero());
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) h[i + j] = h[i + j] + f[i] * g[j];
    return h;
}

namespace {

// determinant of a matrix of polynomials by cofactor expansion (small n)
std::vector<RingElem> polymat_det(const std::vector<std::vector<std::vector<RingElem>>>& M,
                                  std::vector<int>& cols, int row, const RingPtr& R) {
    int n = static_cast<int>(M.size());
    if (row == n) return {R->one()};
    std::vector<RingElem> acc{R->zero()};
    for (std::size_t ci = 0; ci < cols.size(); ++ci) {
        int c = cols[ci];
        if (c < 0) continue;
        cols[ci] = -1;
        auto minor = polymat_det(M, cols, row + 1, R);
        cols[ci] = c;
        auto term = poly_mul(M[row][c], minor);
        // count inversions for the sign: position of ci among live columns
        int pos = 0;
        for (std::size_t k = 0; k < ci; ++k)
            if (cols[k] >= 0) ++pos;
        if (pos % 2) {
            for (auto& t : term) t = -t;
        }
        if (acc.size() < term.size()) acc.resize(term.size(), R->zero());
        for (std::size_t k = 0; k < term.size(); ++k) acc[k] = acc[k] + term[k];
    }
    return acc;
}

}  // namespace

std::vector<RingElem> charpoly(const Mat& A) {
    const RingPtr& R = A.a[0].ring();
    int n = A.rows;
    // entries of t*I - A as degree-<=1 polynomials
    std::vector<std::vector<std::vector<RingElem>>> M(n, std::vector<std::vector<RingElem>>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<RingElem> e{-A.at(i, j)};
            if (i == j) e.push_back(R->one());
            M[i][j] = e;
        }
    std::vector<int> cols(n);
    for (int i = 0; i < n; ++i) cols[i] = i;
    auto p = polymat_det(M, cols, 0, R);
    p.resize(n + 1, R->zero());
    return p;
}

Mat poly_eval_mat(const std::vector<RingElem>& poly, const Mat& A) {
    const RingPtr& R = A.a[0].ring();
    Mat acc = mat_zero(R, A.rows, A.cols);
    for (std::size_t k = poly.size(); k-- > 0;) {
        acc = mat_mul(acc, A);
        for (int i = 0; i < A.rows; ++i) acc.at(i, i) = acc.at(i, i) + poly[k];
    }
    return acc;
}

RingElem poly_eval(const std::vector<RingElem>& poly, const RingElem& x) {
    RingElem acc = x.ring()->zero();
    for (std::size_t k = poly.size(); k-- > 0;) acc = acc * x + poly[k];
    return acc;
}

}  // namespace orbilat
