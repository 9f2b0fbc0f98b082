#include "orbilat/hermitian.hpp"

#include <algorithm>

namespace orbilat {

HermitianSpace make_space(const RingPtr& R, const Mat& gram, std::string label) {
    if (gram.rows != gram.cols) throw SpecError("Gram matrix must be square");
    if (!mat_equal(gram, mat_sigma(mat_transpose(gram))))
        throw SpecError("Gram matrix is not hermitian");
    RingElem d = mat_det(gram);  // throws PrecisionError when degenerate
    (void)d;
    HermitianSpace S;
    S.ring = R;
    S.n = gram.rows;
    S.gram = gram;
    S.label = std::move(label);
    return S;
}

RingElem form(const HermitianSpace& S, const Vec& v, const Vec& w) {
    RingElem acc = S.ring->zero();
    for (int i = 0; i < S.n; ++i)
        for (int j = 0; j < S.n; ++j) acc = acc + sigma(v[i]) * S.gram.at(i, j) * w[j];
    return acc;
}

Lattice dual_lattice(const Lattice& L, const HermitianSpace& S) {
    // columns d_i with J(d_i, b_j) = delta_ij: sigma(D)^T G B = I
    Mat GB = mat_mul(S.gram, L.basis);
    Mat D = mat_sigma(mat_transpose(mat_inverse(GB)));
    return hnf(D);
}

long long dual_index(const HermitianSpace& S) {
    Lattice std_lat = standard_lattice(S.ring, S.n);
    Lattice dual = dual_lattice(std_lat, S);
    return lattice_index(dual, std_lat);
}

Parity parity(const HermitianSpace& S) {
    return (dual_index(S) % 2 == 0) ? Parity::Even : Parity::Odd;
}

Mat adjoint(const Mat& x, const HermitianSpace& S) {
    // x* = G^{-1} sigma(x)^T G
    return mat_mul(mat_inverse(S.gram), mat_mul(mat_sigma(mat_transpose(x)), S.gram));
}

namespace {

// independent columns of a (possibly singular) matrix, selected greedily by
// field-rank elimination with valuation pivoting; with unit_pivots only
// residually independent columns are accepted (idempotent images always have
// a full set of those)
std::vector<int> independent_columns(const Mat& A, bool unit_pivots = false) {
    const RingPtr& R = A.a[0].ring();
    Mat W = A;
    std::vector<int> picked;
    int row = 0;
    for (int j = 0; j < A.cols && row < A.rows; ++j) {
        int piv = -1, best = kValInf;
        for (int i = row; i < A.rows; ++i) {
            int v = R->valuation(W.at(i, j));
            if (v < best) { best = v; piv = i; }
        }
        if (piv < 0 || best >= kValInf) continue;
        if (unit_pivots && best != 0) continue;
        if (piv != row)
            for (int c = 0; c < A.cols; ++c) std::swap(W.at(piv, c), W.at(row, c));
        RingElem inv = R->inverse(W.at(row, j));
        for (int i = 0; i < A.rows; ++i) {
            if (i == row) continue;
            RingElem f = W.at(i, j) * inv;
            if (R->is_zero(f)) continue;
            for (int c = 0; c < A.cols; ++c) W.at(i, c) = W.at(i, c) - f * W.at(row, c);
        }
        picked.push_back(j);
        ++row;
    }
    return picked;
}

}  // namespace

std::vector<FactorSpace> classify_factors(const HermitianSpace& S, const std::vector<Mat>& idems) {
    const RingPtr& R = S.ring;
    // orthogonality, self-adjointness, completeness
    Mat sum = mat_zero(R, S.n, S.n);
    for (std::size_t i = 0; i < idems.size(); ++i) {
        const Mat& e = idems[i];
        if (!mat_equal(mat_mul(e, e), e)) throw SpecError("idempotent fails e^2 = e");
        if (!mat_equal(adjoint(e, S), e)) throw SpecError("idempotent is not self-adjoint");
        for (std::size_t j = 0; j < idems.size(); ++j) {
            if (i == j) continue;
            Mat prod = mat_mul(e, idems[j]);
            for (const auto& x : prod.a)
                if (!R->is_zero(x)) throw SpecError("idempotents are not orthogonal");
        }
        sum = mat_add(sum, e);
    }
    if (!mat_equal(sum, mat_identity(R, S.n))) throw SpecError("idempotents do not sum to the identity");

    std::vector<FactorSpace> out;
    for (const Mat& e : idems) {
        auto cols = independent_columns(e, /*unit_pivots=*/true);
        if (cols.empty()) throw PrecisionError("idempotent image has no residually independent columns");
        Mat B = mat_zero(R, S.n, static_cast<int>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) {
            // normalize each basis column to valuation zero so restrictions
            // never divide by the uniformizer
            int vmin = kValInf;
            for (int i = 0; i < S.n; ++i) vmin = std::min(vmin, R->valuation(e.at(i, cols[j])));
            RingElem scale = R->pi_pow(-vmin);
            for (int i = 0; i < S.n; ++i)
                B.at(i, static_cast<int>(j)) = e.at(i, cols[j]) * scale;
        }
        Mat Gi = mat_mul(mat_sigma(mat_transpose(B)), mat_mul(S.gram, B));
        FactorSpace fs;
        fs.space = make_space(R, Gi, S.label + "-factor");
        fs.parity = parity(fs.space);
        fs.subspace_basis = B;
        out.push_back(std::move(fs));
    }
    return out;
}

// ---- trace lifting / descent ----------------------------------------------

LiftedSpace lift_form(const HermitianSpace& S, const Mat& action, const ExtAlgebra& alg,
                      const AElem& theta) {
    const RingPtr& R = S.ring;
    int d = alg.d;
    if (S.n % d) throw SpecError("space dimension is not divisible by the extension degree");
    int nA = S.n / d;
    // sigma-equivariance of the action: the generator must be self-adjoint
    if (!mat_equal(adjoint(action, S), action))
        throw SpecError("action is not equivariant for conjugation and the adjoint");
    // minimal polynomial must annihilate the action
    {
        Mat z = poly_eval_mat(alg.minpoly, action);
        for (const auto& x : z.a)
            if (!R->is_zero(x)) throw SpecError("action does not satisfy the minimal polynomial");
    }
    // trace pairing (a, b) -> tr(theta a b) must be perfect on the integral level
    Mat tg = mat_zero(R, d, d);
    {
        AElem pa = a_one(alg);
        std::vector<AElem> pows;
        for (int i = 0; i < d; ++i) {
            pows.push_back(pa);
            pa = a_mul(alg, pa, a_gen(alg));
        }
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                tg.at(i, j) = a_trace(alg, a_mul(alg, theta, a_mul(alg, pows[i], pows[j])));
        if (R->valuation(mat_det(tg)) != 0)
            throw SpecError("theta does not generate the inverse different (trace pairing degenerate)");
    }

    // choose an A-basis of V greedily
    std::vector<Vec> chosen;             // the A-basis vectors
    std::vector<Vec> flat;               // their alpha-power expansions
    Mat acc = mat_zero(R, S.n, 0);
    for (int cand = 0; cand < S.n && static_cast<int>(chosen.size()) < nA; ++cand) {
        Vec v(S.n, R->zero());
        v[cand] = R->one();
        // candidate block: v, action v, ..., action^{d-1} v
        std::vector<Vec> block;
        Vec cur = v;
        for (int k = 0; k < d; ++k) {
            block.push_back(cur);
            cur = mat_apply(action, cur);
        }
        Mat test = mat_zero(R, S.n, acc.cols + d);
        for (int j = 0; j < acc.cols; ++j)
            for (int i = 0; i < S.n; ++i) test.at(i, j) = acc.at(i, j);
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < S.n; ++i) test.at(i, acc.cols + k) = block[k][i];
        if (static_cast<int>(independent_columns(test).size()) != test.cols) continue;
        chosen.push_back(v);
        for (auto& b : block) flat.push_back(b);
        acc = test;
    }
    if (static_cast<int>(chosen.size()) != nA)
        throw PrecisionError("could not complete an A-basis of the space");

    // J^A(v, w) solved from tr(theta * t^k * J^A(v,w)) = J(alpha^k v, w)
    LiftedSpace out;
    out.alg = alg;
    out.n = nA;
    out.basis = mat_zero(R, S.n, nA);
    for (int j = 0; j < nA; ++j)
        for (int i = 0; i < S.n; ++i) out.basis.at(i, j) = chosen[j][i];
    out.gram.assign(nA, std::vector<AElem>(nA, a_zero(alg)));
    for (int i = 0; i < nA; ++i)
        for (int j = 0; j < nA; ++j) {
            Vec rhs(d, R->zero());
            Vec av = chosen[i];
            for (int k = 0; k < d; ++k) {
                rhs[k] = form(S, av, chosen[j]);
                av = mat_apply(action, av);
            }
            // tg is symmetric in (i,j); J(alpha^k v, w) = tr(theta alpha^k J^A(v,w))
            AElem z = mat_solve(tg, rhs);
            out.gram[i][j] = z;
        }
    return out;
}

HermitianSpace descend_form(const ExtAlgebra& alg, const std::vector<std::vector<AElem>>& gramA,
                            const AElem& theta) {
    const RingPtr& R = alg.ring;
    int nA = static_cast<int>(gramA.size());
    int d = alg.d;
    int n = nA * d;
    Mat G = mat_zero(R, n, n);
    AElem gen = a_gen(alg);
    for (int i = 0; i < nA; ++i)
        for (int j = 0; j < nA; ++j)
            for (int k = 0; k < d; ++k)
                for (int m = 0; m < d; ++m) {
                    // J(alpha^k b_i, alpha^m b_j) = tr(theta sigma(alpha)^k alpha^m J^A(b_i, b_j))
                    AElem t = a_mul(alg, a_pow(alg, a_sigma(alg, gen), k),
                                    a_mul(alg, a_pow(alg, gen, m), gramA[i][j]));
                    G.at(i * d + k, j * d + m) = a_trace(alg, a_mul(alg, theta, t));
                }
    return make_space(R, G, "descended");
}

}  // namespace orbilat
