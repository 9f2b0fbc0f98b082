#include "orbilat/lattice.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <unordered_set>

namespace orbilat {

namespace {

// divide a by pi^k exactly (k may be negative: multiply)
RingElem shift_pi(const RingElem& a, int k) {
    const RingPtr& R = a.ring();
    if (k == 0) return a;
    if (k > 0) return a * R->pi_pow(k);
    RingElem r = a;
    for (int i = 0; i < -k; ++i) r = R->div_by_pi(r);
    return r;
}

}  // namespace

Lattice hnf(const Mat& columns) {
    const RingPtr& R = columns.a[0].ring();
    int n = columns.rows, m = columns.cols;
    if (m < n) throw SpecError("lattice basis needs at least n columns");
    Mat B = columns;
    int c = m - 1;
    for (int i = n - 1; i >= 0; --i) {
        int piv = -1, best = kValInf;
        for (int j = 0; j <= c; ++j) {
            int v = R->valuation(B.at(i, j));
            if (v < best) { best = v; piv = j; }
        }
        if (piv < 0 || best >= kValInf)
            throw PrecisionError("singular basis at working precision");
        if (piv != c)
            for (int r = 0; r < n; ++r) std::swap(B.at(r, piv), B.at(r, c));
        // clear row i in the remaining columns
        RingElem pivval = B.at(i, c);
        RingElem pivinv = R->inverse(pivval);
        for (int j = 0; j < c; ++j) {
            RingElem f = B.at(i, j) * pivinv;
            if (R->is_zero(f)) continue;
            for (int r = 0; r <= i; ++r) B.at(r, j) = B.at(r, j) - f * B.at(r, c);
        }
        --c;
    }
    // keep the last n columns; normalize pivots to pi^k and reduce above
    Lattice L;
    L.ring = R;
    L.n = n;
    L.basis = mat_zero(R, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) L.basis.at(i, j) = B.at(i, m - n + j);
    std::vector<int> kdiag(n);
    for (int i = 0; i < n; ++i) {
        RingElem d = L.basis.at(i, i);
        int k = R->valuation(d);
        kdiag[i] = k;
        RingElem unit_inv = R->inverse(shift_pi(d, -k));
        for (int r = 0; r <= i; ++r) L.basis.at(r, i) = L.basis.at(r, i) * unit_inv;
        L.basis.at(i, i) = R->pi_pow(k);  // exact uniformizer power
    }
    for (int j = 1; j < n; ++j)
        for (int i = j - 1; i >= 0; --i) {
            RingElem rij = R->canonical_mod(L.basis.at(i, j), kdiag[i]);
            RingElem q = shift_pi(L.basis.at(i, j) - rij, -kdiag[i]);
            if (R->is_zero(q)) { L.basis.at(i, j) = rij; continue; }
            for (int r = 0; r <= i; ++r)
                L.basis.at(r, j) = L.basis.at(r, j) - q * L.basis.at(r, i);
            L.basis.at(i, j) = rij;
        }
    // snap every entry to its canonical window so keys are reproducible;
    // below the diagonal the eliminations leave values that vanish at working
    // precision but may carry junk in the guard digits
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (i < j) {
                L.basis.at(i, j) = R->canonical_mod(L.basis.at(i, j), kdiag[i]);
            } else if (i > j) {
                if (!R->is_zero(L.basis.at(i, j)))
                    throw PrecisionError("Hermite form has a nonzero entry below the diagonal");
                L.basis.at(i, j) = R->zero();
            }
        }
    L.canonical = true;
    return L;
}

Lattice standard_lattice(const RingPtr& R, int n) {
    Lattice L;
    L.ring = R;
    L.n = n;
    L.basis = mat_identity(R, n);
    L.canonical = true;
    return L;
}

Lattice scale_lattice(const RingElem& c, const Lattice& L) {
    return hnf(mat_scalar_mul(c, L.basis));
}

long long lattice_index(const Lattice& L1, const Lattice& L2) {
    long long v1 = 0, v2 = 0;
    for (int i = 0; i < L1.n; ++i) v1 += L1.ring->valuation(L1.basis.at(i, i));
    for (int i = 0; i < L2.n; ++i) v2 += L2.ring->valuation(L2.basis.at(i, i));
    return v2 - v1;
}

bool lattice_contains(const Lattice& L, const Vec& v) {
    const RingPtr& R = L.ring;
    int n = L.n;
    Vec rem = v;
    for (int i = n - 1; i >= 0; --i) {
        RingElem ci = rem[i] * R->inverse(L.basis.at(i, i));
        if (R->valuation(ci) < 0) return false;
        if (!R->is_zero(ci))
            for (int r = 0; r <= i; ++r) rem[r] = rem[r] - ci * L.basis.at(r, i);
    }
    for (int i = 0; i < n; ++i)
        if (!R->is_zero(rem[i])) return false;
    return true;
}

bool lattice_subset(const Lattice& L1, const Lattice& L2) {
    for (int j = 0; j < L1.n; ++j)
        if (!lattice_contains(L2, mat_col(L1.basis, j))) return false;
    return true;
}

bool lattice_equal(const Lattice& L1, const Lattice& L2) {
    return mat_equal(L1.basis, L2.basis);
}

std::string lattice_key(const Lattice& L) {
    const RingPtr& R = L.ring;
    std::string key;
    key.reserve(L.basis.a.size() * (R->ncoords() + 1) * 8);
    for (const auto& x : L.basis.a) {
        std::uint64_t d = static_cast<std::uint64_t>(x.denom());
        key.append(reinterpret_cast<const char*>(&d), 8);
        for (int i = 0; i < R->ncoords(); ++i) {
            std::uint64_t c = x.coords().v[i];
            key.append(reinterpret_cast<const char*>(&c), 8);
        }
    }
    return key;
}

Lattice lattice_sum(const Lattice& L1, const Lattice& L2) {
    const RingPtr& R = L1.ring;
    Mat M = mat_zero(R, L1.n, L1.n + L2.n);
    for (int i = 0; i < L1.n; ++i) {
        for (int j = 0; j < L1.n; ++j) M.at(i, j) = L1.basis.at(i, j);
        for (int j = 0; j < L2.n; ++j) M.at(i, L1.n + j) = L2.basis.at(i, j);
    }
    return hnf(M);
}

Lattice lattice_add_vector(const Lattice& L, const Vec& v) {
    const RingPtr& R = L.ring;
    Mat M = mat_zero(R, L.n, L.n + 1);
    for (int i = 0; i < L.n; ++i) {
        for (int j = 0; j < L.n; ++j) M.at(i, j) = L.basis.at(i, j);
        M.at(i, L.n) = v[i];
    }
    return hnf(M);
}

std::vector<RingElem> canonical_residues(const RingPtr& R, int s) {
    // digit moduli per coordinate slot
    int e = R->e(), w = R->width();
    std::vector<std::uint64_t> mods(static_cast<std::size_t>(e) * w, 1);
    for (int k = 0; k < e; ++k) {
        long long depth = (static_cast<long long>(s) - k + e - 1) / e;
        if (depth < 0) depth = 0;
        if (depth > R->pdepth()) depth = R->pdepth();
        std::uint64_t m = 1;
        for (long long i = 0; i < depth; ++i) m *= static_cast<std::uint64_t>(R->p());
        for (int t = 0; t < w; ++t) mods[static_cast<std::size_t>(k) * w + t] = m;
    }
    std::vector<RingElem> out;
    std::vector<std::uint64_t> cur(mods.size(), 0);
    while (true) {
        Coords c{};
        for (std::size_t i = 0; i < cur.size(); ++i) c.v[i] = cur[i];
        out.push_back(R->from_coords(0, c));
        std::size_t pos = 0;
        while (pos < cur.size() && ++cur[pos] == mods[pos]) cur[pos++] = 0;
        if (pos == cur.size()) break;
    }
    return out;
}

long long FiniteQuotient::length() const {
    long long s = 0;
    for (int d : divisors) s += d;
    return s;
}

double FiniteQuotient::size() const {
    double s = 1;
    for (int d : divisors)
        for (int i = 0; i < d; ++i) s *= static_cast<double>(ring->residue_size());
    return s;
}

std::vector<Vec> FiniteQuotient::residue_reps(std::size_t cap) const {
    if (size() > static_cast<double>(cap))
        throw CapExceeded("quotient too large to enumerate cosets", static_cast<std::size_t>(std::min(size(), 1e18)));
    std::vector<std::vector<RingElem>> per;
    for (int d : divisors) per.push_back(canonical_residues(ring, d));
    std::vector<std::size_t> idx(divisors.size(), 0);
    std::vector<Vec> out;
    while (true) {
        std::vector<RingElem> coords;
        coords.reserve(divisors.size());
        for (std::size_t i = 0; i < divisors.size(); ++i) coords.push_back(per[i][idx[i]]);
        out.push_back(lift(coords));
        std::size_t pos = 0;
        while (pos < idx.size() && ++idx[pos] == per[pos].size()) idx[pos++] = 0;
        if (pos == idx.size()) break;
    }
    return out;
}

Vec FiniteQuotient::lift(const std::vector<RingElem>& coords) const {
    Vec v(sub.n, ring->zero());
    for (int j = 0; j < adapted.cols; ++j)
        for (int i = 0; i < adapted.rows; ++i) v[i] = v[i] + adapted.at(i, j) * coords[j];
    return v;
}

Vec FiniteQuotient::reduce(const Vec& v) const {
    Vec a = mat_solve(adapted, v);
    std::vector<RingElem> canon(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) canon[i] = ring->canonical_mod(a[i], divisors[i]);
    return lift(canon);
}

FiniteQuotient quotient(const Lattice& sub, const Lattice& sup) {
    const RingPtr& R = sub.ring;
    int n = sub.n;
    if (!lattice_subset(sub, sup)) throw SpecError("quotient requires sub <= sup");
    Mat C = mat_mul(mat_inverse(sup.basis), sub.basis);
    Mat Y = sup.basis;  // adapted basis accumulates inverse row operations
    // Smith normal form over the DVR with minimal-valuation pivoting
    for (int t = 0; t < n; ++t) {
        int bi = -1, bj = -1, best = kValInf;
        for (int i = t; i < n; ++i)
            for (int j = t; j < n; ++j) {
                int v = R->valuation(C.at(i, j));
                if (v < best) { best = v; bi = i; bj = j; }
            }
        if (bi < 0 || best >= kValInf)
            throw PrecisionError("quotient inclusion is singular at working precision");
        if (bi != t) {
            for (int j = 0; j < n; ++j) std::swap(C.at(bi, j), C.at(t, j));
            for (int i = 0; i < n; ++i) std::swap(Y.at(i, bi), Y.at(i, t));
        }
        if (bj != t)
            for (int i = 0; i < n; ++i) std::swap(C.at(i, bj), C.at(i, t));
        // normalize pivot to pi^d: scale row t of C by the inverse unit, and
        // undo it on column t of Y so that Y * C stays fixed
        RingElem piv = C.at(t, t);
        int d = R->valuation(piv);
        RingElem unit = shift_pi(piv, -d);
        RingElem unit_inv = R->inverse(unit);
        for (int j = 0; j < n; ++j) C.at(t, j) = C.at(t, j) * unit_inv;
        C.at(t, t) = R->pi_pow(d);
        for (int i = 0; i < n; ++i) Y.at(i, t) = Y.at(i, t) * unit;
        // clear column t below/above via row ops (these change Y by inverse column ops)
        for (int i = 0; i < n; ++i) {
            if (i == t) continue;
            RingElem f = C.at(i, t) * R->inverse(C.at(t, t));
            if (R->is_zero(f)) continue;
            for (int j = 0; j < n; ++j) C.at(i, j) = C.at(i, j) - f * C.at(t, j);
            // row_i -= f row_t  =>  Y col_t += f * col_i
            for (int r = 0; r < n; ++r) Y.at(r, t) = Y.at(r, t) + f * Y.at(r, i);
        }
        // clear row t via column ops (these do not affect Y)
        for (int j = 0; j < n; ++j) {
            if (j == t) continue;
            RingElem f = C.at(t, j) * R->inverse(C.at(t, t));
            if (R->is_zero(f)) continue;
            for (int i = 0; i < n; ++i) C.at(i, j) = C.at(i, j) - f * C.at(i, t);
        }
    }
    FiniteQuotient Q;
    Q.ring = R;
    Q.sub = sub;
    Q.sup = sup;
    Q.adapted = Y;
    Q.divisors.resize(n);
    for (int i = 0; i < n; ++i) Q.divisors[i] = R->valuation(C.at(i, i));
    // invariant guard: sup = span(adapted) and sub = span(adapted * diag(pi^d))
    {
        if (!lattice_equal(hnf(Y), sup))
            throw PrecisionError("quotient adapted basis does not span the top lattice");
        Mat scaled = Y;
        for (int j = 0; j < n; ++j) {
            RingElem pw = R->pi_pow(Q.divisors[j]);
            for (int i = 0; i < n; ++i) scaled.at(i, j) = scaled.at(i, j) * pw;
        }
        if (!lattice_equal(hnf(scaled), sub))
            throw PrecisionError("quotient adapted basis does not refine the bottom lattice");
    }
    return Q;
}

bool is_stable_linear(const Lattice& L, const Mat& A, bool require_equal) {
    for (int j = 0; j < L.n; ++j)
        if (!lattice_contains(L, mat_apply(A, mat_col(L.basis, j)))) return false;
    if (require_equal) {
        RingElem d = mat_det(A);
        if (L.ring->valuation(d) != 0) return false;
    }
    return true;
}

bool is_stable_semilinear(const Lattice& L, const Mat& T, bool require_equal) {
    for (int j = 0; j < L.n; ++j)
        if (!lattice_contains(L, mat_apply(T, vec_sigma(mat_col(L.basis, j))))) return false;
    if (require_equal) {
        RingElem d = mat_det(T);
        if (L.ring->valuation(d) != 0) return false;
    }
    return true;
}

namespace {

bool stable_under_all(const Lattice& L, const StabilizerOps& stab) {
    for (const auto& A : stab.linear)
        if (!is_stable_linear(L, A, false)) return false;
    for (const auto& T : stab.semilinear)
        if (!is_stable_semilinear(L, T, false)) return false;
    return true;
}

// smallest lattice containing M and v that is stable under all operators
Lattice stable_closure(const Lattice& M, const Vec& v, const StabilizerOps& stab) {
    Lattice cur = lattice_add_vector(M, v);
    for (int rounds = 0; rounds < 4096; ++rounds) {
        std::vector<Vec> extra;
        for (int j = 0; j < cur.n; ++j) {
            Vec b = mat_col(cur.basis, j);
            for (const auto& A : stab.linear) extra.push_back(mat_apply(A, b));
            for (const auto& T : stab.semilinear) extra.push_back(mat_apply(T, vec_sigma(b)));
        }
        Mat all = mat_zero(cur.ring, cur.n, cur.n + static_cast<int>(extra.size()));
        for (int i = 0; i < cur.n; ++i) {
            for (int j = 0; j < cur.n; ++j) all.at(i, j) = cur.basis.at(i, j);
            for (std::size_t j = 0; j < extra.size(); ++j) all.at(i, cur.n + static_cast<int>(j)) = extra[j][i];
        }
        Lattice next = hnf(all);
        if (lattice_equal(next, cur)) return cur;
        cur = next;
    }
    throw PrecisionError("stabilizer closure did not terminate");
}

std::vector<Lattice> enumerate_bfs(const FiniteQuotient& Q, const StabilizerOps* stab,
                                   std::size_t cap_elems, std::size_t cap_out) {
    auto reps = Q.residue_reps(cap_elems);
    std::vector<Lattice> out;
    std::unordered_set<std::string> seen;
    std::deque<std::size_t> work;
    Lattice start = stab ? stable_closure(Q.sub, mat_col(Q.sub.basis, 0), *stab) : Q.sub;
    out.push_back(start);
    seen.insert(lattice_key(start));
    work.push_back(0);
    while (!work.empty()) {
        std::size_t mi = work.front();
        work.pop_front();
        Lattice M = out[mi];
        for (const auto& v : reps) {
            if (lattice_contains(M, v)) continue;
            Lattice next = stab ? stable_closure(M, v, *stab) : lattice_add_vector(M, v);
            auto key = lattice_key(next);
            if (seen.insert(key).second) {
                if (out.size() >= cap_out)
                    throw CapExceeded("too many intermediate lattices", cap_out + 1);
                out.push_back(next);
                work.push_back(out.size() - 1);
            }
        }
    }
    return out;
}

// closure BFS that draws candidate generators from the pi-torsion layer above
// the current lattice: every strictly larger stable lattice T contains some
// v not in M with pi v in M, so adjoining socle representatives reaches all
// of them; far fewer candidates than full coset enumeration
std::vector<Lattice> enumerate_stable_socle(const FiniteQuotient& Q, const StabilizerOps& stab,
                                            std::size_t cap_elems, std::size_t cap_out) {
    const RingPtr& R = Q.ring;
    std::vector<Lattice> out;
    std::unordered_set<std::string> seen;
    std::deque<std::size_t> work;
    Lattice start = stable_closure(Q.sub, mat_col(Q.sub.basis, 0), stab);
    out.push_back(start);
    seen.insert(lattice_key(start));
    work.push_back(0);
    auto res1 = canonical_residues(R, 1);
    while (!work.empty()) {
        std::size_t mi = work.front();
        work.pop_front();
        Lattice M = out[mi];
        FiniteQuotient QM = quotient(M, Q.sup);
        std::vector<Vec> gens;
        for (std::size_t i = 0; i < QM.divisors.size(); ++i) {
            if (QM.divisors[i] < 1) continue;
            Vec col = mat_col(QM.adapted, static_cast<int>(i));
            gens.push_back(vec_scalar_mul(R->pi_pow(QM.divisors[i] - 1), col));
        }
        if (gens.empty()) continue;
        double cand = 1;
        for (std::size_t g = 0; g < gens.size(); ++g) cand *= static_cast<double>(res1.size());
        if (cand > static_cast<double>(cap_elems))
            throw CapExceeded("socle layer too large to enumerate",
                              static_cast<std::size_t>(std::min(cand, 1e18)));
        std::vector<std::size_t> idx(gens.size(), 0);
        while (true) {
            // advance the odometer first so the all-zero draw is skipped
            std::size_t pos = 0;
            while (pos < idx.size() && ++idx[pos] == res1.size()) idx[pos++] = 0;
            if (pos == idx.size()) break;
            Vec v(Q.sub.n, R->zero());
            for (std::size_t g = 0; g < gens.size(); ++g) {
                if (idx[g] == 0) continue;
                v = vec_add(v, vec_scalar_mul(res1[idx[g]], gens[g]));
            }
            Lattice next = stable_closure(M, v, stab);
            auto key = lattice_key(next);
            if (seen.insert(key).second) {
                if (out.size() >= cap_out)
                    throw CapExceeded("too many intermediate lattices", cap_out + 1);
                out.push_back(next);
                work.push_back(out.size() - 1);
            }
        }
    }
    return out;
}

struct EchelonCtx {
    const FiniteQuotient* Q;
    const RingPtr* R;
    int n;
    std::vector<std::vector<RingElem>> residues_by_depth;  // canonical reps mod pi^s
    Mat H;                      // current candidate, adapted coordinates
    std::vector<int> diag;      // a_i exponents
    std::vector<Lattice> out;
    std::size_t cap_out = 0;
};

// check pi^{d_j} e_j in span of H's columns 0..j (upper triangular solve)
bool column_feasible(EchelonCtx& ctx, int j) {
    const RingPtr& R = *ctx.R;
    std::vector<RingElem> x(static_cast<std::size_t>(j) + 1, R->zero());
    RingElem rhs = R->pi_pow(ctx.Q->divisors[j]);
    // x_j
    RingElem xj = rhs * R->inverse(ctx.H.at(j, j));
    if (R->valuation(xj) < 0) return false;
    x[j] = xj;
    for (int i = j - 1; i >= 0; --i) {
        RingElem acc = R->zero();
        for (int k = i + 1; k <= j; ++k) acc = acc + ctx.H.at(i, k) * x[k];
        RingElem xi = (-acc) * R->inverse(ctx.H.at(i, i));
        if (!R->is_zero(xi) && R->valuation(xi) < 0) return false;
        x[i] = xi;
    }
    return true;
}

void echelon_recurse_entries(EchelonCtx& ctx, int j, int i);

void echelon_recurse_column(EchelonCtx& ctx, int j) {
    if (j == ctx.n) {
        // assemble ambient lattice: adapted * H
        Mat amb = mat_mul(ctx.Q->adapted, ctx.H);
        Lattice L = hnf(amb);
        if (ctx.out.size() >= ctx.cap_out)
            throw CapExceeded("too many intermediate lattices", ctx.cap_out + 1);
        ctx.out.push_back(L);
        return;
    }
    const RingPtr& R = *ctx.R;
    for (int a = 0; a <= ctx.Q->divisors[j]; ++a) {
        ctx.diag[j] = a;
        ctx.H.at(j, j) = R->pi_pow(a);
        echelon_recurse_entries(ctx, j, j - 1);
    }
    // reset column
    for (int i = 0; i <= j; ++i) ctx.H.at(i, j) = R->zero();
    ctx.H.at(j, j) = R->one();
}

void echelon_recurse_entries(EchelonCtx& ctx, int j, int i) {
    if (i < 0) {
        if (column_feasible(ctx, j)) echelon_recurse_column(ctx, j + 1);
        return;
    }
    auto& reps = ctx.residues_by_depth[ctx.diag[i]];
    for (const auto& r : reps) {
        ctx.H.at(i, j) = r;
        echelon_recurse_entries(ctx, j, i - 1);
    }
    ctx.H.at(i, j) = ctx.R->get()->zero();
}

std::vector<Lattice> enumerate_echelon(const FiniteQuotient& Q, std::size_t cap_out) {
    EchelonCtx ctx;
    ctx.Q = &Q;
    ctx.R = &Q.ring;
    ctx.n = Q.sub.n;
    ctx.cap_out = cap_out;
    int dmax = 0;
    for (int d : Q.divisors) dmax = std::max(dmax, d);
    for (int s = 0; s <= dmax; ++s) ctx.residues_by_depth.push_back(canonical_residues(Q.ring, s));
    ctx.H = mat_identity(Q.ring, ctx.n);
    ctx.diag.assign(ctx.n, 0);
    echelon_recurse_column(ctx, 0);
    return ctx.out;
}

}  // namespace

std::vector<Lattice> enumerate_intermediate(const FiniteQuotient& Q, EnumMode mode,
                                            const StabilizerOps* stab, std::size_t cap_elems,
                                            std::size_t cap_out) {
    switch (mode) {
        case EnumMode::BfsAll: {
            auto all = enumerate_bfs(Q, nullptr, cap_elems, cap_out);
            if (stab && !stab->empty()) {
                std::vector<Lattice> filt;
                for (auto& L : all)
                    if (stable_under_all(L, *stab)) filt.push_back(std::move(L));
                return filt;
            }
            return all;
        }
        case EnumMode::EchelonAll: {
            auto all = enumerate_echelon(Q, cap_out);
            if (stab && !stab->empty()) {
                std::vector<Lattice> filt;
                for (auto& L : all)
                    if (stable_under_all(L, *stab)) filt.push_back(std::move(L));
                return filt;
            }
            return all;
        }
        case EnumMode::StableClosure: {
            if (!stab || stab->empty()) return enumerate_bfs(Q, nullptr, cap_elems, cap_out);
            return enumerate_stable_socle(Q, *stab, cap_elems, cap_out);
        }
    }
    throw SpecError("unknown enumeration mode");
}

}  // namespace orbilat
