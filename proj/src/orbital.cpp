#include "orbilat/orbital.hpp"

namespace orbilat {

LaurentSeries series_mul(const LaurentSeries& a, const LaurentSeries& b) {
    LaurentSeries c;
    for (const auto& [i, ai] : a.coeff)
        for (const auto& [j, bj] : b.coeff) c.coeff[i + j] += ai * bj;
    for (auto it = c.coeff.begin(); it != c.coeff.end();)
        it = it->second == 0 ? c.coeff.erase(it) : std::next(it);
    return c;
}

LaurentSeries series_shift(const LaurentSeries& a, long long k) {
    LaurentSeries c;
    for (const auto& [i, ai] : a.coeff) c.coeff[i + k] = ai;
    return c;
}

long long series_value_at_one(const LaurentSeries& a) {
    long long s = 0;
    for (const auto& [i, ai] : a.coeff) s += ai;
    return s;
}

long long series_log_derivative(const LaurentSeries& a) {
    long long s = 0;
    for (const auto& [i, ai] : a.coeff) s += i * ai;
    return s;
}

Lattice span_lattice(const HermitianSpace& S, const Mat& x, const Vec& j) {
    const RingPtr& R = S.ring;
    int n = S.n;
    std::vector<Vec> cols;
    Vec cur = j;
    for (int i = 0; i < n; ++i) {
        cols.push_back(cur);
        cur = mat_apply(x, cur);
    }
    Lattice L = hnf(mat_from_cols(R, cols));
    // an x-stable span stabilizes within rank-many rounds; divergence means
    // the generated order is not integral
    for (int round = 0; round < n + 6; ++round) {
        // adjoin x * basis and re-span
        Mat ext = mat_zero(R, n, 2 * n);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < n; ++c) ext.at(i, c) = L.basis.at(i, c);
        Mat xb = mat_mul(x, L.basis);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < n; ++c) ext.at(i, n + c) = xb.at(i, c);
        Lattice next = hnf(ext);
        if (lattice_equal(next, L)) return L;
        L = next;
    }
    throw PrecisionError("span saturation did not terminate: x generates a non-integral order");
}

RSPair make_pair(const HermitianSpace& S, const Mat& x, const Vec& j) {
    const RingPtr& R = S.ring;
    int n = S.n;
    RSPair P;
    P.space = S;
    P.x = x;
    P.j = j;

    std::vector<Vec> cols, scols;
    {
        Vec cur = j;
        for (int i = 0; i < n; ++i) {
            cols.push_back(cur);
            cur = mat_apply(x, cur);
        }
    }
    P.cyclic = mat_from_cols(R, cols);
    try {
        (void)mat_det(P.cyclic);
    } catch (const PrecisionError&) {
        throw NotRegularSemisimple("E[x] j does not span the space");
    }
    P.xstar = adjoint(x, S);

    // adjoint stability both ways: x* = sum c_i x^i and x = sum c'_i (x*)^i,
    // all coefficients integral
    Mat cyc_inv = mat_inverse(P.cyclic);
    {
        Vec c = mat_apply(cyc_inv, mat_apply(P.xstar, j));
        Mat acc = mat_zero(R, n, n);
        Mat xp = mat_identity(R, n);
        for (int i = 0; i < n; ++i) {
            if (R->valuation(c[i]) < 0)
                throw NotAdjointStable("adjoint has a non-integral expression in x");
            acc = mat_add(acc, mat_scalar_mul(c[i], xp));
            if (i + 1 < n) xp = mat_mul(xp, x);
        }
        if (!mat_equal(acc, P.xstar))
            throw NotAdjointStable("adjoint does not lie in E[x]");
    }
    {
        Vec cur = j;
        for (int i = 0; i < n; ++i) {
            scols.push_back(cur);
            cur = mat_apply(P.xstar, cur);
        }
        Mat star_cyclic = mat_from_cols(R, scols);
        Mat sc_inv;
        try {
            sc_inv = mat_inverse(star_cyclic);
        } catch (const PrecisionError&) {
            throw NotAdjointStable("E[x*] j does not span the space");
        }
        Vec c = mat_apply(sc_inv, mat_apply(x, j));
        Mat acc = mat_zero(R, n, n);
        Mat xp = mat_identity(R, n);
        for (int i = 0; i < n; ++i) {
            if (R->valuation(c[i]) < 0)
                throw NotAdjointStable("x has a non-integral expression in the adjoint");
            acc = mat_add(acc, mat_scalar_mul(c[i], xp));
            if (i + 1 < n) xp = mat_mul(xp, P.xstar);
        }
        if (!mat_equal(acc, x)) throw NotAdjointStable("x does not lie in E[x*]");
    }

    // tau: v = Phi a  ->  Phi* sigma(a), so tau = Phi_star sigma(Phi)^{-1}
    Mat star_basis = mat_from_cols(R, scols);
    P.tau = mat_mul(star_basis, mat_inverse(mat_sigma(P.cyclic)));
    {
        Mat tt = mat_mul(P.tau, mat_sigma(P.tau));
        if (!mat_equal(tt, mat_identity(R, n)))
            throw PrecisionError("tau is not an involution at working precision");
        if (!vec_equal(mat_apply(P.tau, vec_sigma(j)), j))
            throw PrecisionError("tau does not fix j");
    }

    P.span = span_lattice(S, x, j);
    P.dual = dual_lattice(P.span, S);
    P.span_in_dual = lattice_subset(P.span, P.dual);
    return P;
}

std::map<long long, long long> CountingSet::by_length() const {
    std::map<long long, long long> m;
    for (long long l : lengths) ++m[l];
    return m;
}

CountingSet counting_sets(const RSPair& pair, EnumMode strategy, std::size_t cap) {
    CountingSet M;
    if (!pair.span_in_dual) return M;
    FiniteQuotient Q = quotient(pair.span, pair.dual);
    StabilizerOps stab;
    stab.linear.push_back(pair.x);
    stab.semilinear.push_back(pair.tau);
    M.lattices = enumerate_intermediate(Q, strategy, &stab, cap, cap);
    for (const auto& L : M.lattices) M.lengths.push_back(lattice_index(L, pair.span));
    return M;
}

LaurentSeries orbital_series(const CountingSet& M) {
    LaurentSeries s;
    for (long long l : M.lengths) {
        long long sign = (l % 2 == 0) ? 1 : -1;
        s.coeff[l] += sign;
    }
    for (auto it = s.coeff.begin(); it != s.coeff.end();)
        it = it->second == 0 ? s.coeff.erase(it) : std::next(it);
    return s;
}

LaurentSeries orbital_series(const RSPair& pair) { return orbital_series(counting_sets(pair)); }

long long orbital_value(const CountingSet& M) { return series_value_at_one(orbital_series(M)); }

long long orbital_value(const RSPair& pair) { return orbital_value(counting_sets(pair)); }

long long derived_orbital(const CountingSet& M) {
    // -sum (-1)^i i |M_i|
    return -series_log_derivative(orbital_series(M));
}

long long derived_orbital(const RSPair& pair) { return derived_orbital(counting_sets(pair)); }

std::vector<Lattice> unitary_lattices(const RSPair& pair, std::size_t cap) {
    std::vector<Lattice> out;
    if (!pair.span_in_dual) return out;
    FiniteQuotient Q = quotient(pair.span, pair.dual);
    StabilizerOps stab;
    stab.linear.push_back(pair.x);
    auto latts = enumerate_intermediate(Q, EnumMode::StableClosure, &stab, cap, cap);
    for (const auto& L : latts)
        if (lattice_equal(dual_lattice(L, pair.space), L)) out.push_back(L);
    return out;
}

long long unitary_count(const RSPair& pair, std::size_t cap) {
    return static_cast<long long>(unitary_lattices(pair, cap).size());
}

std::pair<long long, int> transfer_factor(const Mat& gamma, const Vec& u, const Lattice& ref) {
    const RingPtr& R = ref.ring;
    int n = ref.n;
    std::vector<Vec> cols;
    Vec cur = u;
    for (int i = 0; i < n; ++i) {
        cols.push_back(cur);
        cur = mat_apply(gamma, cur);
    }
    Lattice span;
    try {
        span = hnf(mat_from_cols(R, cols));
    } catch (const PrecisionError&) {
        throw NotRegularSemisimple("gamma is not regular semisimple with respect to u");
    }
    long long l = lattice_index(ref, span);
    int omega = (l % 2 == 0) ? 1 : -1;
    return {l, omega};
}

LaurentSeries series_with_transfer(const LaurentSeries& s, long long l) {
    return series_shift(s, l);
}

bool regular_semisimple_element(const Mat& gamma, const Vec& u, const Vec& udual) {
    const RingPtr& R = u[0].ring();
    int n = static_cast<int>(u.size());
    std::vector<Vec> cols;
    Vec cur = u;
    for (int i = 0; i < n; ++i) {
        cols.push_back(cur);
        cur = mat_apply(gamma, cur);
    }
    try {
        (void)mat_det(mat_from_cols(R, cols));
    } catch (const PrecisionError&) {
        return false;
    }
    // covector orbit: udual gamma^i as rows
    Mat rows = mat_zero(R, n, n);
    Vec rcur = udual;
    Mat gt = mat_transpose(gamma);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < n; ++c) rows.at(i, c) = rcur[c];
        rcur = mat_apply(gt, rcur);
    }
    try {
        (void)mat_det(rows);
    } catch (const PrecisionError&) {
        return false;
    }
    return true;
}

MatchInvariants match_invariants(const Mat& gamma, const Vec& u, const Vec& udual) {
    if (!regular_semisimple_element(gamma, u, udual))
        throw NotRegularSemisimple("matching invariants need a regular semisimple element");
    MatchInvariants inv;
    inv.charpoly = charpoly(gamma);
    const RingPtr& R = u[0].ring();
    int n = static_cast<int>(u.size());
    Vec cur = u;
    for (int i = 0; i < 2 * n; ++i) {
        RingElem m = R->zero();
        for (int k = 0; k < n; ++k) m = m + udual[k] * cur[k];
        inv.moments.push_back(m);
        cur = mat_apply(gamma, cur);
    }
    return inv;
}

bool is_match(const MatchInvariants& a, const MatchInvariants& b) {
    if (a.charpoly.size() != b.charpoly.size() || a.moments.size() != b.moments.size()) return false;
    for (std::size_t i = 0; i < a.charpoly.size(); ++i)
        if (a.charpoly[i] != b.charpoly[i]) return false;
    for (std::size_t i = 0; i < a.moments.size(); ++i)
        if (a.moments[i] != b.moments[i]) return false;
    return true;
}

}  // namespace orbilat
