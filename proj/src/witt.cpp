#include "orbilat/witt.hpp"

#include <algorithm>

namespace orbilat {

// ---------------------------------------------------------------------------
// WittRing

WittRingPtr WittRing::make(const RingPtr& R, const RingElem& pi_in_R, long long qO, int m) {
    if (m < 1) throw SpecError("Witt truncation length must be positive");
    auto W = std::shared_ptr<WittRing>(new WittRing());
    W->R_ = R;
    W->pi_ = pi_in_R;
    W->q_ = qO;
    W->m_ = m;
    int vpi = R->valuation(pi_in_R);
    if (vpi < 1 || vpi >= kValInf) throw SpecError("pi image must be a non-unit of positive valuation");
    W->Rb_ = R->with_precision(R->precision() + (m - 1) * vpi + 2);
    W->pi_b_ = R->coerce(pi_in_R, W->Rb_);
    return W;
}

RingElem WittRing::promote(const RingElem& x) const { return R_->coerce(x, Rb_); }
RingElem WittRing::demote(const RingElem& x) const { return Rb_->coerce(x, R_); }

WittVec WittRing::zero(int len) const {
    if (len < 0) len = m_;
    WittVec v;
    v.W = shared_from_this();
    v.c.assign(len, R_->zero());
    return v;
}

WittVec WittRing::one(int len) const {
    WittVec v = zero(len);
    if (!v.c.empty()) v.c[0] = R_->one();
    return v;
}

WittVec WittRing::teichmuller(const RingElem& a, int len) const {
    WittVec v = zero(len);
    if (!v.c.empty()) v.c[0] = a;
    return v;
}

WittVec WittRing::from_coords(const std::vector<RingElem>& c) const {
    if (static_cast<int>(c.size()) > m_) throw SpecError("too many Witt coordinates");
    WittVec v;
    v.W = shared_from_this();
    v.c = c;
    return v;
}

std::vector<RingElem> WittRing::ghost_boosted(const WittVec& x) const {
    int len = x.len();
    std::vector<RingElem> g(len, Rb_->zero());
    RingElem pw = Rb_->one();
    std::vector<RingElem> lifted;
    for (auto& ci : x.c) lifted.push_back(promote(ci));
    for (int n = 0; n < len; ++n) {
        RingElem acc = Rb_->zero();
        RingElem pipow = Rb_->one();
        for (int i = 0; i <= n; ++i) {
            // pi^i * x_i^{q^{n-i}}
            RingElem term = lifted[i];
            long long e = 1;
            for (int t = 0; t < n - i; ++t) e *= q_;
            RingElem powed = Rb_->one();
            RingElem base = term;
            long long ee = e;
            while (ee) {
                if (ee & 1) powed = powed * base;
                base = base * base;
                ee >>= 1;
            }
            acc = acc + pipow * powed;
            pipow = pipow * pi_b_;
        }
        g[n] = acc;
    }
    (void)pw;
    return g;
}

std::vector<RingElem> WittRing::ghost(const WittVec& x) const {
    auto g = ghost_boosted(x);
    for (auto& e : g) e = demote(e);
    return g;
}

WittVec WittRing::solve_from_ghost_boosted(const std::vector<RingElem>& g) const {
    int len = static_cast<int>(g.size());
    std::vector<RingElem> z(len, Rb_->zero());
    for (int n = 0; n < len; ++n) {
        RingElem acc = g[n];
        RingElem pipow = Rb_->one();
        for (int i = 0; i < n; ++i) {
            long long e = 1;
            for (int t = 0; t < n - i; ++t) e *= q_;
            RingElem powed = Rb_->one();
            RingElem base = z[i];
            long long ee = e;
            while (ee) {
                if (ee & 1) powed = powed * base;
                base = base * base;
                ee >>= 1;
            }
            acc = acc - pipow * powed;
            pipow = pipow * pi_b_;
        }
        // divide by pi^n, exactly
        for (int t = 0; t < n; ++t) acc = Rb_->div_exact(acc, pi_b_);
        z[n] = acc;
    }
    WittVec out;
    out.W = shared_from_this();
    for (auto& e : z) out.c.push_back(demote(e));
    return out;
}

WittVec WittRing::from_ghost(const std::vector<RingElem>& g) const {
    std::vector<RingElem> gb;
    for (auto& e : g) gb.push_back(promote(e));
    return solve_from_ghost_boosted(gb);
}

WittVec WittRing::scalar(const RingElem& a, int len) const {
    if (len < 0) len = m_;
    std::vector<RingElem> g(len, a);
    return from_ghost(g);
}

WittVec WittRing::from_int(long long a, int len) const { return scalar(R_->from_int(a), len); }

WittVec WittRing::add(const WittVec& x, const WittVec& y) const {
    int len = std::min(x.len(), y.len());
    WittVec xs = x, ys = y;
    xs.c.resize(len, R_->zero());
    ys.c.resize(len, R_->zero());
    auto gx = ghost_boosted(xs), gy = ghost_boosted(ys);
    for (int i = 0; i < len; ++i) gx[i] = gx[i] + gy[i];
    return solve_from_ghost_boosted(gx);
}

WittVec WittRing::sub(const WittVec& x, const WittVec& y) const { return add(x, neg(y)); }

WittVec WittRing::neg(const WittVec& x) const {
    auto g = ghost_boosted(x);
    for (auto& e : g) e = -e;
    return solve_from_ghost_boosted(g);
}

WittVec WittRing::mul(const WittVec& x, const WittVec& y) const {
    int len = std::min(x.len(), y.len());
    WittVec xs = x, ys = y;
    xs.c.resize(len, R_->zero());
    ys.c.resize(len, R_->zero());
    auto gx = ghost_boosted(xs), gy = ghost_boosted(ys);
    for (int i = 0; i < len; ++i) gx[i] = gx[i] * gy[i];
    return solve_from_ghost_boosted(gx);
}

WittVec WittRing::frobenius(const WittVec& x) const {
    if (x.len() < 2) throw SpecError("Frobenius needs at least two coordinates");
    auto g = ghost_boosted(x);
    std::vector<RingElem> shifted(g.begin() + 1, g.end());
    return solve_from_ghost_boosted(shifted);
}

WittVec WittRing::verschiebung(const WittVec& x) const {
    WittVec v;
    v.W = shared_from_this();
    int outlen = std::min(x.len() + 1, m_);
    v.c.assign(outlen, R_->zero());
    for (int i = 1; i < outlen; ++i) v.c[i] = x.c[i - 1];
    return v;
}

bool WittRing::in_verschiebung_image(const WittVec& x) const {
    return !x.c.empty() && R_->is_zero(x.c[0]);
}

WittVec WittRing::versch_inverse(const WittVec& x) const {
    if (!in_verschiebung_image(x))
        throw SpecError("element is not in the image of the Verschiebung");
    WittVec v;
    v.W = shared_from_this();
    v.c.assign(x.c.begin() + 1, x.c.end());
    return v;
}

bool WittRing::eq(const WittVec& x, const WittVec& y, int upto) const {
    int len = std::min(x.len(), y.len());
    if (upto >= 0) len = std::min(len, upto);
    for (int i = 0; i < len; ++i)
        if (!R_->equal(x.c[i], y.c[i])) return false;
    return true;
}

bool WittRing::is_zero(const WittVec& x, int upto) const {
    int len = x.len();
    if (upto >= 0) len = std::min(len, upto);
    for (int i = 0; i < len; ++i)
        if (!R_->is_zero(x.c[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// symbolic structure polynomials

namespace {

using Mono = std::vector<std::uint16_t>;

StructPoly sp_zero(int nvars) {
    StructPoly p;
    p.nvars = nvars;
    return p;
}

StructPoly sp_var(int nvars, int idx) {
    StructPoly p;
    p.nvars = nvars;
    Mono m(nvars, 0);
    m[idx] = 1;
    p.terms[m] = 1;
    return p;
}

void sp_addin(StructPoly& a, const StructPoly& b, __int128 scale = 1) {
    for (auto& [m, c] : b.terms) {
        auto& slot = a.terms[m];
        slot += c * scale;
        if (slot == 0) a.terms.erase(m);
    }
}

StructPoly sp_mul(const StructPoly& a, const StructPoly& b, std::size_t cap) {
    StructPoly out;
    out.nvars = a.nvars;
    for (auto& [ma, ca] : a.terms)
        for (auto& [mb, cb] : b.terms) {
            Mono m = ma;
            for (int i = 0; i < out.nvars; ++i) m[i] = static_cast<std::uint16_t>(m[i] + mb[i]);
            auto& slot = out.terms[m];
            slot += ca * cb;
            if (slot == 0) out.terms.erase(m);
            if (out.terms.size() > cap)
                throw SpecError("structure polynomial expansion exceeds the term budget");
        }
    return out;
}

StructPoly sp_pow(const StructPoly& a, long long e, std::size_t cap) {
    StructPoly out;
    out.nvars = a.nvars;
    out.terms[Mono(a.nvars, 0)] = 1;
    StructPoly base = a;
    while (e) {
        if (e & 1) out = sp_mul(out, base, cap);
        e >>= 1;
        if (e) base = sp_mul(base, base, cap);
    }
    return out;
}

void sp_div_exact(StructPoly& a, long long d) {
    for (auto& [m, c] : a.terms) {
        if (c % d != 0) throw InexactDivision("structure polynomial coefficient not divisible");
        c /= d;
    }
}

}  // namespace

StructurePolys structure_polys(long long p, long long q, int m, std::size_t term_cap) {
    if (m < 1 || m > 4) throw SpecError("structure polynomials limited to 1 <= m <= 4");
    StructurePolys out;
    out.p = p;
    out.q = q;
    out.m = m;
    int nv = 2 * m;
    // ghost polynomials of x and y
    auto ghost_of = [&](int base, int n) {
        StructPoly g = sp_zero(nv);
        __int128 pipow = 1;
        for (int i = 0; i <= n; ++i) {
            long long e = 1;
            for (int t = 0; t < n - i; ++t) e *= q;
            sp_addin(g, sp_pow(sp_var(nv, base + i), e, term_cap), pipow);
            pipow *= p;
        }
        return g;
    };
    auto solve = [&](auto combine) {
        std::vector<StructPoly> z;
        for (int n = 0; n < m; ++n) {
            StructPoly acc = combine(n);
            __int128 pipow = 1;
            for (int i = 0; i < n; ++i) {
                long long e = 1;
                for (int t = 0; t < n - i; ++t) e *= q;
                sp_addin(acc, sp_pow(z[i], e, term_cap), -pipow);
                pipow *= p;
            }
            for (int i = 0; i < n; ++i) sp_div_exact(acc, p);
            z.push_back(std::move(acc));
        }
        return z;
    };
    out.sum = solve([&](int n) {
        StructPoly g = ghost_of(0, n);
        sp_addin(g, ghost_of(m, n));
        return g;
    });
    out.product = solve([&](int n) { return sp_mul(ghost_of(0, n), ghost_of(m, n), term_cap); });
    return out;
}

RingElem struct_poly_eval(const StructPoly& sp, const std::vector<RingElem>& xy) {
    const RingPtr& R = xy[0].ring();
    RingElem acc = R->zero();
    RingElem big = R->from_int(1LL << 62);
    for (auto& [m, c] : sp.terms) {
        // coefficient may exceed 64 bits: fold base-2^62 digits
        __int128 cc = c < 0 ? -c : c;
        std::vector<long long> digits;
        while (cc > 0) {
            digits.push_back(static_cast<long long>(cc % (static_cast<__int128>(1) << 62)));
            cc /= (static_cast<__int128>(1) << 62);
        }
        RingElem coef = R->zero();
        for (std::size_t i = digits.size(); i-- > 0;) coef = coef * big + R->from_int(digits[i]);
        if (c < 0) coef = -coef;
        RingElem term = coef;
        for (std::size_t v = 0; v < m.size(); ++v)
            for (int t = 0; t < m[v]; ++t) term = term * xy[v];
        acc = acc + term;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// tensor ring O' (x) W_O(R)

TensorRing make_tensor_ring(const WittRingPtr& W, const std::vector<long long>& eis,
                            const RingElem& pi_prime_in_R) {
    TensorRing T;
    T.W = W;
    T.eis = eis;
    T.e = eis.empty() ? 1 : static_cast<int>(eis.size()) - 1;
    T.pi_prime = pi_prime_in_R;
    if (!eis.empty() && eis.back() != 1) throw SpecError("Eisenstein polynomial must be monic");
    return T;
}

TensorElem t_zero(const TensorRing& T, int len) {
    TensorElem a;
    for (int i = 0; i < T.e; ++i) a.comp.push_back(T.W->zero(len));
    return a;
}

TensorElem t_one(const TensorRing& T, int len) {
    TensorElem a = t_zero(T, len);
    a.comp[0] = T.W->one(len);
    return a;
}

TensorElem t_from_witt(const TensorRing& T, const WittVec& w) {
    TensorElem a = t_zero(T, w.len());
    a.comp[0] = w;
    return a;
}

TensorElem t_pi_prime(const TensorRing& T, int len) {
    TensorElem a = t_zero(T, len);
    if (T.e == 1) {
        a.comp[0] = T.W->scalar(T.pi_prime, len);
    } else {
        a.comp[1] = T.W->one(len);
    }
    return a;
}

TensorElem t_teich_pi_prime(const TensorRing& T, int len) {
    TensorElem a = t_zero(T, len);
    a.comp[0] = T.W->teichmuller(T.pi_prime, len);
    return a;
}

TensorElem t_add(const TensorRing& T, const TensorElem& a, const TensorElem& b) {
    TensorElem c;
    for (int i = 0; i < T.e; ++i) c.comp.push_back(T.W->add(a.comp[i], b.comp[i]));
    return c;
}

TensorElem t_sub(const TensorRing& T, const TensorElem& a, const TensorElem& b) {
    TensorElem c;
    for (int i = 0; i < T.e; ++i) c.comp.push_back(T.W->sub(a.comp[i], b.comp[i]));
    return c;
}

TensorElem t_neg(const TensorRing& T, const TensorElem& a) {
    TensorElem c;
    for (int i = 0; i < T.e; ++i) c.comp.push_back(T.W->neg(a.comp[i]));
    return c;
}

TensorElem t_mul(const TensorRing& T, const TensorElem& a, const TensorElem& b) {
    int len = T.W->m();
    for (auto& w : a.comp) len = std::min(len, w.len());
    for (auto& w : b.comp) len = std::min(len, w.len());
    std::vector<WittVec> prod(2 * T.e - 1, T.W->zero(len));
    for (int i = 0; i < T.e; ++i)
        for (int j = 0; j < T.e; ++j)
            prod[i + j] = T.W->add(prod[i + j], T.W->mul(a.comp[i], b.comp[j]));
    // reduce pi'^{e+s} by the Eisenstein relation with scalar coefficients
    for (int d = 2 * T.e - 2; d >= T.e; --d) {
        WittVec cd = prod[d];
        if (T.W->is_zero(cd)) continue;
        prod[d] = T.W->zero(len);
        for (int k = 0; k < T.e; ++k) {
            WittVec coef = T.W->from_int(-T.eis[k], len);
            prod[d - T.e + k] = T.W->add(prod[d - T.e + k], T.W->mul(coef, cd));
        }
    }
    TensorElem c;
    for (int i = 0; i < T.e; ++i) c.comp.push_back(prod[i]);
    return c;
}

TensorElem t_sigma(const TensorRing& T, const TensorElem& a) {
    TensorElem c;
    for (int i = 0; i < T.e; ++i) c.comp.push_back(T.W->frobenius(a.comp[i]));
    return c;
}

TensorElem t_versch(const TensorRing& T, const TensorElem& a) {
    TensorElem c;
    for (int i = 0; i < T.e; ++i) c.comp.push_back(T.W->verschiebung(a.comp[i]));
    return c;
}

TensorElem t_versch_inv(const TensorRing& T, const TensorElem& a) {
    TensorElem c;
    for (int i = 0; i < T.e; ++i) c.comp.push_back(T.W->versch_inverse(a.comp[i]));
    return c;
}

bool t_eq(const TensorRing& T, const TensorElem& a, const TensorElem& b, int upto) {
    for (int i = 0; i < T.e; ++i)
        if (!T.W->eq(a.comp[i], b.comp[i], upto)) return false;
    return true;
}

bool t_in_aug_ideal(const TensorRing& T, const TensorElem& a) {
    // augmentation: sum pi'^k * (comp_k)_0 in R
    const RingPtr& R = T.W->coeff_ring();
    RingElem acc = R->zero();
    RingElem pw = R->one();
    for (int k = 0; k < T.e; ++k) {
        if (!a.comp[k].c.empty()) acc = acc + pw * a.comp[k].c[0];
        pw = pw * T.pi_prime;
    }
    return R->is_zero(acc);
}

bool t_in_scalar_ideal(const TensorRing& T, const TensorElem& a) {
    for (int k = 0; k < T.e; ++k)
        if (!T.W->in_verschiebung_image(a.comp[k])) return false;
    return true;
}

bool t_is_unit(const TensorRing& T, const TensorElem& a) {
    // Lemma-12.4-style residue test: image in (O'/pi') (x) (R/pi')
    const RingPtr& R = T.W->coeff_ring();
    if (a.comp[0].c.empty()) return false;
    return !R->residue_is_zero(a.comp[0].c[0]);
}

TensorElem t_inverse(const TensorRing& T, const TensorElem& a) {
    if (!t_is_unit(T, a)) throw SpecError("tensor element is not a unit");
    const RingPtr& R = T.W->coeff_ring();
    int len = T.W->m();
    for (auto& w : a.comp) len = std::min(len, w.len());
    // Newton from the residue inverse of the leading coordinate
    TensorElem z = t_zero(T, len);
    z.comp[0] = T.W->teichmuller(R->inverse(a.comp[0].c[0]), len);
    TensorElem two = t_add(T, t_one(T, len), t_one(T, len));
    int iters = 4;
    for (int t = 1; t < T.e * T.W->m() * T.W->coeff_ring()->stored_depth(); t *= 2) ++iters;
    for (int i = 0; i < iters; ++i) {
        TensorElem az = t_mul(T, a, z);
        z = t_mul(T, z, t_sub(T, two, az));
        if (t_eq(T, az, t_one(T, len))) break;
    }
    if (!t_eq(T, t_mul(T, a, z), t_one(T, len)))
        throw PrecisionError("tensor inversion did not converge");
    return z;
}

TensorElem t_random(const TensorRing& T, std::mt19937_64& rng, int len) {
    if (len < 0) len = T.W->m();
    TensorElem a = t_zero(T, len);
    for (int k = 0; k < T.e; ++k) {
        std::vector<RingElem> c;
        for (int i = 0; i < len; ++i) c.push_back(T.W->coeff_ring()->random_integral(rng, 2));
        a.comp[k] = T.W->from_coords(c);
    }
    return a;
}

// ---------------------------------------------------------------------------
// Lubin-Tate frames

LTFrame make_lt_frame(const WittRingPtr& W, const std::vector<long long>& eis,
                      const RingElem& pi_prime_in_R) {
    LTFrame F;
    F.T = make_tensor_ring(W, eis, pi_prime_in_R);
    const TensorRing& T = F.T;
    int e = T.e;
    F.xi0 = t_sub(T, t_pi_prime(T), t_teich_pi_prime(T));

    // theta-bar = (-1)^{e+1} [ sum_{j<e} pi'^j (x) [pi'^{e-1-j}]
    //                          + sum_{i=1}^{e-1} a_i sum_{j<i} pi'^j (x) [pi'^{i-1-j}] ]
    const RingPtr& R = W->coeff_ring();
    auto term = [&](int j, int tpow) {
        // pi'^j (x) [pi'^tpow]
        TensorElem t = t_zero(T);
        RingElem val = R->one();
        for (int s = 0; s < tpow; ++s) val = val * T.pi_prime;
        WittVec tv = W->teichmuller(val);
        if (e == 1) {
            t.comp[0] = tv;
            for (int s = 0; s < j; ++s) t.comp[0] = W->mul(t.comp[0], W->scalar(T.pi_prime));
        } else {
            t.comp[j] = tv;
        }
        return t;
    };
    TensorElem acc = t_zero(T);
    for (int j = 0; j < e; ++j) acc = t_add(T, acc, term(j, e - 1 - j));
    for (int i = 1; i <= e - 1; ++i) {
        TensorElem inner = t_zero(T);
        for (int j = 0; j < i; ++j) inner = t_add(T, inner, term(j, i - 1 - j));
        TensorElem coef = t_from_witt(T, W->from_int(eis.empty() ? 0 : eis[i]));
        acc = t_add(T, acc, t_mul(T, coef, inner));
    }
    if (e % 2 == 0) acc = t_neg(T, acc);  // (-1)^{e+1}
    F.theta = acc;

    // property (i): theta * xi0 lies in O' (x) I_O(R)
    TensorElem tx = t_mul(T, F.theta, F.xi0);
    if (!t_in_scalar_ideal(T, tx))
        throw PrecisionError("theta fails the ideal-membership property");

    // kappa = V^{-1}(theta xi0), with its unit certificate
    F.kappa = t_versch_inv(T, tx);
    if (!t_is_unit(T, F.kappa)) throw PrecisionError("kappa is not a unit");
    return F;
}

TensorElem frame_sigma_dot(const LTFrame& F, const TensorElem& xi) {
    TensorElem tx = t_mul(F.T, F.theta, xi);
    if (!t_in_scalar_ideal(F.T, tx))
        throw SpecError("element is not in the frame ideal (theta xi outside V-image)");
    return t_versch_inv(F.T, tx);
}

int theta_image_valuation(const LTFrame& F) {
    // image in O' (x) W_O(O'/pi'): kill pi' in the coefficients (coordinatewise
    // residue) and read off min(j + e*i) over surviving coordinates
    const RingPtr& R = F.T.W->coeff_ring();
    int e = F.T.e;
    int best = kValInf;
    for (int j = 0; j < e; ++j) {
        const WittVec& w = F.theta.comp[j];
        for (int i = 0; i < w.len(); ++i) {
            // coordinate mod pi'
            if (R->residue_is_zero(w.c[i])) continue;
            best = std::min(best, j + e * i);
            break;  // deeper Witt coordinates sit above pi^i already
        }
    }
    return best;
}

TensorElem lt_display_f1(const LTFrame& F, const TensorElem& kappa) {
    const TensorRing& T = F.T;
    TensorElem a = t_mul(T, F.theta, F.xi0);
    TensorElem va = t_versch_inv(T, a);
    return t_mul(T, t_inverse(T, va), t_mul(T, t_sigma(T, F.theta), kappa));
}

TensorElem frame_sigma_dot_kappa(const TensorRing& T, const TensorElem& kappa,
                                 const TensorElem& theta_for_F1, const TensorElem& xi) {
    // decompose xi = xi0 * Y + 1 (x) zeta with zeta in I_O(R):
    //   xi = sum pi'^k (x) w_k,
    //   pi'^k (x) 1 - 1 (x) [pibar'^k] = xi0 * sum_{j<k} pi'^j (x) [pibar'^{k-1-j}]
    const WittRingPtr& W = T.W;
    const RingPtr& R = W->coeff_ring();
    int e = T.e;
    TensorElem xi0 = t_sub(T, t_pi_prime(T), t_teich_pi_prime(T));
    TensorElem Y = t_zero(T);
    WittVec zeta = W->zero();
    for (int k = 0; k < e; ++k) {
        const WittVec& wk = xi.comp[k];
        // zeta += [pibar'^k] w_k
        RingElem val = R->one();
        for (int s = 0; s < k; ++s) val = val * T.pi_prime;
        zeta = W->add(zeta, W->mul(W->teichmuller(val), wk));
        // Y += (sum_{j<k} pi'^j (x) [pibar'^{k-1-j}]) * (1 (x) w_k)
        TensorElem geo = t_zero(T);
        for (int j = 0; j < k; ++j) {
            RingElem v2 = R->one();
            for (int s = 0; s < k - 1 - j; ++s) v2 = v2 * T.pi_prime;
            TensorElem tt = t_zero(T);
            if (e == 1) {
                tt.comp[0] = W->teichmuller(v2);
                for (int s = 0; s < j; ++s) tt.comp[0] = W->mul(tt.comp[0], W->scalar(T.pi_prime));
            } else {
                tt.comp[j] = W->teichmuller(v2);
            }
            geo = t_add(T, geo, tt);
        }
        geo = t_mul(T, geo, t_from_witt(T, wk));
        Y = t_add(T, Y, geo);
    }
    if (!W->in_verschiebung_image(zeta))
        throw SpecError("element is not in the frame ideal");
    // sigma-dot(xi) = sigma(Y) kappa + V^{-1}(1 (x) zeta) F(1)
    // with F(1) = V^{-1}(theta xi0)^{-1} sigma(theta) kappa
    TensorElem a = t_mul(T, theta_for_F1, xi0);
    TensorElem f1 = t_mul(T, t_inverse(T, t_versch_inv(T, a)),
                          t_mul(T, t_sigma(T, theta_for_F1), kappa));
    TensorElem part1 = t_mul(T, t_sigma(T, Y), kappa);
    TensorElem part2 = t_mul(T, t_from_witt(T, W->versch_inverse(zeta)), f1);
    return t_add(T, part1, part2);
}

TensorElem convert_to_window_op(const LTFrame& F, const RankOneDisplay& D) {
    // F'(1) = kappa^{-1} Fdot(xi0 * 1)
    return t_mul(F.T, t_inverse(F.T, F.kappa), D.fdot_xi0);
}

RankOneDisplay convert_from_window_op(const LTFrame& F, const TensorElem& f1prime) {
    // F(x) = F'(theta x): F(1) = sigma(theta) F'(1); Fdot(xi0) = kappa F'(1)
    RankOneDisplay D;
    D.f1 = t_mul(F.T, t_sigma(F.T, F.theta), f1prime);
    D.fdot_xi0 = t_mul(F.T, F.kappa, f1prime);
    return D;
}

WittVec base_morphism(const WittRingPtr& source, const WittRingPtr& target, const WittVec& x) {
    // alpha(x) = sum (pi/pi')^i V'^i [x_i]
    const RingPtr& R = source->coeff_ring();
    RingElem ratio = R->div_exact(source->pi(), target->pi());
    WittVec acc = target->zero();
    for (int i = 0; i < x.len(); ++i) {
        WittVec term = target->teichmuller(x.c[i]);
        for (int t = 0; t < i; ++t) term = target->verschiebung(term);
        RingElem rpow = R->one();
        for (int t = 0; t < i; ++t) rpow = rpow * ratio;
        term = target->mul(target->scalar(rpow), term);
        acc = target->add(acc, term);
    }
    return acc;
}

}  // namespace orbilat
