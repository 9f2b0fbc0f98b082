#include "orbilat/ext_algebra.hpp"

#include "orbilat/residue_poly.hpp"

namespace orbilat {

ExtAlgebra make_ext_algebra(const RingPtr& R, const std::vector<long long>& minpoly) {
    if (minpoly.size() < 2 || minpoly.back() != 1)
        throw SpecError("extension minimal polynomial must be monic of positive degree");
    ExtAlgebra A;
    A.ring = R;
    A.d = static_cast<int>(minpoly.size()) - 1;
    A.minpoly_int = minpoly;
    for (long long c : minpoly) A.minpoly.push_back(R->from_int(c));
    // residue degree: smallest f | d with gcd(mbar, t^{Q^f} - t) of degree f
    // and mbar equal to that factor to the power d/f
    respoly::RPoly mbar(A.minpoly.begin(), A.minpoly.end());
    mbar = respoly::reduce(R, mbar);
    long long Q = R->residue_size();
    int found = 0;
    for (int f = 1; f <= A.d; ++f) {
        if (A.d % f) continue;
        // t^{Q^f} mod mbar
        respoly::RPoly t{R->zero(), R->one()};
        respoly::RPoly acc = t;
        for (int i = 0; i < f; ++i) acc = respoly::powmod(R, acc, Q, mbar);
        respoly::RPoly diff = respoly::sub(R, acc, t);
        respoly::RPoly g = respoly::gcd(R, mbar, diff);
        if (respoly::degree(g) == f) {
            respoly::RPoly pw{R->one()};
            for (int i = 0; i < A.d / f; ++i) pw = respoly::mul(R, pw, g);
            if (respoly::degree(respoly::sub(R, pw, mbar)) < 0) { found = f; break; }
        }
    }
    if (!found)
        throw SpecError("minimal polynomial does not define an unramified/totally-ramified tower over E");
    A.res_degree = found;
    A.ram_degree = A.d / found;
    return A;
}

AElem a_zero(const ExtAlgebra& A) { return AElem(A.d, A.ring->zero()); }

AElem a_one(const ExtAlgebra& A) {
    AElem x = a_zero(A);
    x[0] = A.ring->one();
    return x;
}

AElem a_gen(const ExtAlgebra& A) {
    AElem x = a_zero(A);
    if (A.d == 1) {
        // t = -m_0
        x[0] = -A.minpoly[0];
    } else {
        x[1] = A.ring->one();
    }
    return x;
}

AElem a_from_ring(const ExtAlgebra& A, const RingElem& c) {
    AElem x = a_zero(A);
    x[0] = c;
    return x;
}

AElem a_add(const ExtAlgebra& A, const AElem& x, const AElem& y) {
    AElem z = x;
    for (int i = 0; i < A.d; ++i) z[i] = x[i] + y[i];
    return z;
}

AElem a_sub(const ExtAlgebra& A, const AElem& x, const AElem& y) {
    AElem z = x;
    for (int i = 0; i < A.d; ++i) z[i] = x[i] - y[i];
    return z;
}

AElem a_neg(const ExtAlgebra&, const AElem& x) {
    AElem z = x;
    for (auto& c : z) c = -c;
    return z;
}

AElem a_mul(const ExtAlgebra& A, const AElem& x, const AElem& y) {
    const RingPtr& R = A.ring;
    std::vector<RingElem> prod(2 * A.d - 1, R->zero());
    for (int i = 0; i < A.d; ++i)
        for (int j = 0; j < A.d; ++j) prod[i + j] = prod[i + j] + x[i] * y[j];
    // reduce by the monic minimal polynomial
    for (int k = 2 * A.d - 2; k >= A.d; --k) {
        RingElem c = prod[k];
        if (R->is_zero(c)) continue;
        prod[k] = R->zero();
        for (int i = 0; i < A.d; ++i) prod[k - A.d + i] = prod[k - A.d + i] - c * A.minpoly[i];
    }
    prod.resize(A.d, R->zero());
    return prod;
}

AElem a_pow(const ExtAlgebra& A, AElem x, long long k) {
    AElem r = a_one(A);
    while (k) {
        if (k & 1) r = a_mul(A, r, x);
        x = a_mul(A, x, x);
        k >>= 1;
    }
    return r;
}

AElem a_sigma(const ExtAlgebra&, const AElem& x) {
    AElem z = x;
    for (auto& c : z) c = sigma(c);
    return z;
}

bool a_equal(const ExtAlgebra& A, const AElem& x, const AElem& y) {
    for (int i = 0; i < A.d; ++i)
        if (x[i] != y[i]) return false;
    return true;
}

bool a_is_zero(const ExtAlgebra& A, const AElem& x) {
    for (int i = 0; i < A.d; ++i)
        if (!A.ring->is_zero(x[i])) return false;
    return true;
}

Mat a_mult_matrix(const ExtAlgebra& A, const AElem& x) {
    Mat M = mat_zero(A.ring, A.d, A.d);
    AElem col = x;
    AElem gen = a_gen(A);
    for (int j = 0; j < A.d; ++j) {
        for (int i = 0; i < A.d; ++i) M.at(i, j) = col[i];
        if (j + 1 < A.d) col = a_mul(A, col, gen);
    }
    return M;
}

RingElem a_trace(const ExtAlgebra& A, const AElem& x) {
    Mat M = a_mult_matrix(A, x);
    RingElem t = A.ring->zero();
    for (int i = 0; i < A.d; ++i) t = t + M.at(i, i);
    return t;
}

AElem a_inverse(const ExtAlgebra& A, const AElem& x) {
    // solve (mult matrix) * y = e_0
    Mat M = a_mult_matrix(A, x);
    Vec e0(A.d, A.ring->zero());
    e0[0] = A.ring->one();
    return mat_solve(M, e0);
}

AElem a_theta(const ExtAlgebra& A) {
    // m'(alpha)
    AElem gen = a_gen(A);
    AElem mp = a_zero(A);
    AElem pw = a_one(A);
    for (int i = 1; i <= A.d; ++i) {
        AElem term = pw;
        for (auto& c : term) c = c * A.minpoly[i] * A.ring->from_int(i);
        mp = a_add(A, mp, term);
        if (i < A.d) pw = a_mul(A, pw, gen);
    }
    return a_inverse(A, mp);
}

int a_valuation(const ExtAlgebra& A, const AElem& x) {
    if (a_is_zero(A, x)) return kValInf;
    RingElem nm = mat_det(a_mult_matrix(A, x));
    int v = A.ring->valuation(nm);
    if (v >= kValInf) return kValInf;
    if (v % A.res_degree) throw PrecisionError("norm valuation not divisible by the residue degree");
    return v / A.res_degree;
}

}  // namespace orbilat
