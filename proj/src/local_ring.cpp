#include "orbilat/local_ring.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace orbilat {

namespace {

bool is_prime(long long n) {
    if (n < 2) return false;
    for (long long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

int vp_int(long long a, long long p) {
    if (a == 0) return 1 << 20;
    int v = 0;
    while (a % p == 0) { a /= p; ++v; }
    return v;
}

// ---- small F_p[x] helpers used only during ring construction ----

using FpPoly = std::vector<std::uint64_t>;  // little-endian, coefficients mod p

FpPoly fp_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& h, std::uint64_t p) {
    std::size_t n = h.size() - 1;
    std::vector<std::uint64_t> prod(2 * n, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
    for (std::size_t d = prod.size(); d-- > n;) {
        std::uint64_t c = prod[d];
        if (!c) continue;
        prod[d] = 0;
        for (std::size_t i = 0; i < n; ++i) {
            // x^n = -(h_0 + ... + h_{n-1} x^{n-1})
            std::uint64_t sub = (c * h[i]) % p;
            prod[d - n + i] = (prod[d - n + i] + p - sub) % p;
        }
    }
    prod.resize(n);
    return prod;
}

FpPoly fp_powmod(FpPoly base, unsigned long long exp, const FpPoly& h, std::uint64_t p) {
    std::size_t n = h.size() - 1;
    FpPoly r(n, 0);
    r[0] = 1;
    while (exp) {
        if (exp & 1) r = fp_mulmod(r, base, h, p);
        base = fp_mulmod(base, base, h, p);
        exp >>= 1;
    }
    return r;
}

bool fp_equal_x(const FpPoly& a) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::uint64_t want = (i == 1) ? 1u : 0u;
        if (a[i] != want) return false;
    }
    return true;
}

bool fp_is_const(const FpPoly& a) {
    for (std::size_t i = 1; i < a.size(); ++i)
        if (a[i]) return false;
    return true;
}

unsigned long long ipow(unsigned long long b, int e) {
    unsigned long long r = 1;
    while (e--) r *= b;
    return r;
}

// gcd of (x^{p^k} - x) with h detected via the splitting-field criterion:
// h (monic, degree n) is irreducible iff x^{p^n} == x mod h and for every
// prime l | n, x^{p^{n/l}} - x is a unit mod h.  For the small degrees used
// here a unit test "the power is not a root-sharing polynomial" reduces to a
// gcd computation; we instead use the simpler sufficient routine below.
FpPoly fp_gcd(FpPoly a, FpPoly b, std::uint64_t p) {
    auto deg = [](const FpPoly& f) {
        for (std::size_t i = f.size(); i-- > 0;)
            if (f[i]) return static_cast<long>(i);
        return -1L;
    };
    auto inv_mod_p = [&](std::uint64_t x) {
        std::uint64_t r = 1, e = p - 2, base = x % p;
        while (e) {
            if (e & 1) r = r * base % p;
            base = base * base % p;
            e >>= 1;
        }
        return r;
    };
    while (deg(b) >= 0) {
        long da = deg(a), db = deg(b);
        if (da < db) { std::swap(a, b); continue; }
        std::uint64_t f = a[da] % p * inv_mod_p(b[db]) % p;
        for (long i = 0; i <= db; ++i)
            a[da - db + i] = (a[da - db + i] + p - f * b[i] % p) % p;
        while (!a.empty() && a.back() == 0) a.pop_back();
        if (deg(a) < deg(b)) std::swap(a, b);
    }
    return a;
}

bool fp_irreducible(const FpPoly& h, std::uint64_t p) {
    std::size_t n = h.size() - 1;
    FpPoly x(n, 0);
    if (n == 1) return true;
    x[1] = 1;
    FpPoly xq = fp_powmod(x, ipow(p, static_cast<int>(n)), h, p);
    if (!fp_equal_x(xq)) return false;
    for (std::size_t l = 2; l <= n; ++l) {
        if (n % l) continue;
        bool lprime = true;
        for (std::size_t d = 2; d * d <= l; ++d)
            if (l % d == 0) lprime = false;
        if (!lprime) continue;
        FpPoly xe = fp_powmod(x, ipow(p, static_cast<int>(n / l)), h, p);
        // subtract x
        FpPoly diff = xe;
        if (diff.size() < 2) diff.resize(2, 0);
        diff[1] = (diff[1] + p - 1) % p;
        FpPoly hh = h;
        FpPoly g = fp_gcd(hh, diff, p);
        long dg = -1;
        for (std::size_t i = g.size(); i-- > 0;)
            if (g[i]) { dg = static_cast<long>(i); break; }
        if (dg > 0) return false;
    }
    return true;
}

}  // namespace

// ------------------------------------------------------------------------
// construction

RingPtr LocalRing::make(const FieldSpec& spec, int N) {
    if (!is_prime(spec.p)) throw SpecError("p must be prime");
    if (spec.p == 2) throw SpecError("p must be odd");
    if (spec.f0 < 1) throw SpecError("inertia degree must be positive");
    if (N < 2) throw SpecError("precision must be at least 2");

    auto ring = std::shared_ptr<LocalRing>(new LocalRing());
    LocalRing& R = *ring;
    R.spec_ = spec;
    R.requested_N_ = N;
    R.e_ = spec.ram_degree();
    R.fE_ = spec.quadratic ? 2 * spec.f0 : spec.f0;
    if (R.e_ * R.fE_ > 12 || R.e_ > 6 || spec.f0 > 6)
        throw SpecError("combined ramification/residue degree exceeds this build's coordinate cap");
    // guard digits beyond the requested precision absorb the value-precision
    // loss that denominators inflict on fixed-modulus products (an element
    // pi^{-k} c is only determined mod pi^{depth - k}); equality is always
    // taken mod pi^N.  Twelve digits cover the dual/double-dual chains that
    // occur under the N = 2*maxdiv + 8 precision policy; when p^M would leave
    // the 64-bit coordinate budget the guard shrinks (never below six), and
    // the doubled-precision validation covers the residue of risk.
    {
        int base_digits = (N + R.e_ - 1) / R.e_;
        int max_m = 0;
        std::uint64_t pw = 1;
        while (pw <= (std::uint64_t(1) << 63) / static_cast<std::uint64_t>(spec.p)) {
            pw *= static_cast<std::uint64_t>(spec.p);
            ++max_m;
        }
        int guard = std::min(12, max_m - base_digits);
        if (guard < 6) throw SpecError("requested precision leaves fewer than six guard digits");
        R.M_ = base_digits + guard;
    }
    R.q_ = 1;
    for (int i = 0; i < spec.f0; ++i) R.q_ *= spec.p;
    R.qres_ = 1;
    for (int i = 0; i < R.fE_; ++i) R.qres_ *= spec.p;

    // p^M, with overflow guard
    std::uint64_t pm = 1;
    for (int i = 0; i < R.M_; ++i) {
        if (pm > (std::uint64_t(1) << 63) / static_cast<std::uint64_t>(spec.p))
            throw SpecError("p^precision exceeds the 64-bit coordinate modulus");
        pm *= static_cast<std::uint64_t>(spec.p);
    }
    R.pmod_ = pm;

    std::uint64_t p = static_cast<std::uint64_t>(spec.p);

    // Eisenstein validation and tail
    if (!spec.eis.empty()) {
        if (spec.eis.size() < 2 || spec.eis.back() != 1)
            throw SpecError("Eisenstein polynomial must be monic of degree >= 1");
        if (vp_int(spec.eis[0], spec.p) != 1)
            throw SpecError("Eisenstein polynomial: constant term must have valuation exactly 1");
        for (std::size_t i = 1; i + 1 < spec.eis.size(); ++i)
            if (vp_int(spec.eis[i], spec.p) < 1)
                throw SpecError("Eisenstein polynomial: middle coefficients must have positive valuation");
    }

    // irreducible modulus of the unramified part: x^f0 = tail (negated h)
    if (spec.f0 > 1) {
        int f0 = spec.f0;
        // deterministic search over monic polynomials x^f0 + tail
        std::vector<std::uint64_t> tail(f0, 0);
        bool found = false;
        while (!found) {
            FpPoly h(f0 + 1, 0);
            h[f0] = 1;
            for (int i = 0; i < f0; ++i) h[i] = tail[i];
            if (fp_irreducible(h, p)) {
                found = true;
                R.h_tail_.resize(f0);
                for (int i = 0; i < f0; ++i)
                    R.h_tail_[i] = (pm - tail[i] % pm) % pm;  // x^f0 = -(tail)
                break;
            }
            int pos = 0;
            while (pos < f0 && ++tail[pos] == p) tail[pos++] = 0;
            if (pos == f0) throw SpecError("no irreducible polynomial found");  // unreachable
        }
    }

    // quadratic non-residue of F_q, lifted
    if (spec.quadratic) {
        std::uint64_t qq = static_cast<std::uint64_t>(R.q_);
        if (spec.f0 == 1) {
            std::uint64_t c = 0;
            for (std::uint64_t z = 2; z < p; ++z) {
                std::uint64_t r = 1, b = z, e2 = (p - 1) / 2;
                while (e2) {
                    if (e2 & 1) r = r * b % p;
                    b = b * b % p;
                    e2 >>= 1;
                }
                if (r != 1) { c = z; break; }
            }
            if (!c) throw SpecError("no quadratic non-residue found");
            R.nonres_.assign(1, c);
        } else {
            FpPoly h(spec.f0 + 1, 0);
            h[spec.f0] = 1;
            for (int i = 0; i < spec.f0; ++i) h[i] = (p - R.h_tail_[i] % p) % p;
            std::vector<std::uint64_t> z(spec.f0, 0);
            bool found = false;
            while (!found) {
                int pos = 0;
                while (pos < spec.f0 && ++z[pos] == p) z[pos++] = 0;
                if (pos == spec.f0) throw SpecError("no quadratic non-residue found");
                FpPoly cand(z.begin(), z.end());
                FpPoly r = fp_powmod(cand, (qq - 1) / 2, h, p);
                bool is_one = fp_is_const(r) && r[0] == 1;
                bool is_zero = true;
                for (auto v : r)
                    if (v) is_zero = false;
                if (!is_one && !is_zero) {
                    R.nonres_.assign(z.begin(), z.end());
                    found = true;
                }
            }
        }
        R.nonres_.resize(spec.f0, 0);
    }

    // Eisenstein tail as unramified-part elements; t^e = sum eis_tail_[k] t^k
    if (R.e_ > 1) {
        R.eis_tail_.resize(R.e_);
        for (int k = 0; k < R.e_; ++k) {
            Coords c{};
            long long a = -spec.eis[k];  // negate
            std::uint64_t val = static_cast<std::uint64_t>(((a % static_cast<long long>(pm)) + static_cast<long long>(pm)) % static_cast<long long>(pm));
            c.v[0] = val;  // integer: x^0 omega^0 slot of the k-th... stored as width coords
            R.eis_tail_[k] = c;
        }
    }

    // p / pi = -B(t)^{-1} t^{e-1} where t^e = -p B(t)
    if (R.e_ > 1) {
        Coords B{};
        for (int k = 0; k < R.e_; ++k) {
            long long bk = spec.eis[k] / spec.p;
            std::uint64_t val = static_cast<std::uint64_t>(((bk % static_cast<long long>(pm)) + static_cast<long long>(pm)) % static_cast<long long>(pm));
            B.v[static_cast<std::size_t>(k) * R.fE_] = val;
        }
        RingElem Bel(ring, 0, B);
        RingElem Binv = R.inverse(Bel);
        RingElem mp = R.neg(R.pi_pow(R.e_ - 1));
        RingElem pd = R.mul(mp, Binv);
        if (pd.denom() != 0) throw InexactDivision("p/pi computed with a denominator");
        R.p_div_pi_ = pd.coords();
        R.p_div_pi_ready_ = true;
    } else {
        Coords one{};
        one.v[0] = 1;
        R.p_div_pi_ = one;
        R.p_div_pi_ready_ = true;
    }
    return ring;
}

RingPtr make_ring(const FieldSpec& spec, int N) { return LocalRing::make(spec, N); }

// ------------------------------------------------------------------------
// coordinate kernels

std::uint64_t LocalRing::mulmod(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % pmod_);
}
std::uint64_t LocalRing::addmod(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    if (s >= pmod_) s -= pmod_;
    return s;
}
std::uint64_t LocalRing::submod(std::uint64_t a, std::uint64_t b) const {
    return a >= b ? a - b : a + pmod_ - b;
}

void LocalRing::c_add(const Coords& a, const Coords& b, Coords& out) const {
    int n = ncoords();
    for (int i = 0; i < n; ++i) out.v[i] = addmod(a.v[i], b.v[i]);
}
void LocalRing::c_sub(const Coords& a, const Coords& b, Coords& out) const {
    int n = ncoords();
    for (int i = 0; i < n; ++i) out.v[i] = submod(a.v[i], b.v[i]);
}
void LocalRing::c_neg(const Coords& a, Coords& out) const {
    int n = ncoords();
    for (int i = 0; i < n; ++i) out.v[i] = a.v[i] ? pmod_ - a.v[i] : 0;
}

// Galois-ring multiply: inputs/outputs are f0-coordinate blocks
void LocalRing::g_mul(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out) const {
    int f0 = spec_.f0;
    if (f0 == 1) {
        out[0] = mulmod(a[0], b[0]);
        return;
    }
    std::uint64_t prod[24] = {0};
    for (int i = 0; i < f0; ++i) {
        if (!a[i]) continue;
        for (int j = 0; j < f0; ++j)
            if (b[j]) prod[i + j] = addmod(prod[i + j], mulmod(a[i], b[j]));
    }
    for (int d = 2 * f0 - 2; d >= f0; --d) {
        std::uint64_t c = prod[d];
        if (!c) continue;
        prod[d] = 0;
        for (int i = 0; i < f0; ++i)
            if (h_tail_[i]) prod[d - f0 + i] = addmod(prod[d - f0 + i], mulmod(c, h_tail_[i]));
    }
    for (int i = 0; i < f0; ++i) out[i] = prod[i];
}

// unramified-part multiply (handles the omega layer); blocks of width fE
void LocalRing::u_mul(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out) const {
    int f0 = spec_.f0;
    if (!spec_.quadratic) {
        g_mul(a, b, out);
        return;
    }
    std::uint64_t t00[6], t11[6], t01[6], t10[6], cc[6];
    g_mul(a, b, t00);
    g_mul(a + f0, b + f0, t11);
    g_mul(a, b + f0, t01);
    g_mul(a + f0, b, t10);
    g_mul(t11, nonres_.data(), cc);
    for (int i = 0; i < f0; ++i) {
        out[i] = addmod(t00[i], cc[i]);
        out[f0 + i] = addmod(t01[i], t10[i]);
    }
}

void LocalRing::c_mul(const Coords& a, const Coords& b, Coords& out) const {
    int w = fE_;
    if (e_ == 1) {
        u_mul(a.v.data(), b.v.data(), out.v.data());
        return;
    }
    // t-polynomial convolution with Eisenstein reduction
    std::uint64_t prod[12][12] = {};  // up to 2e-1 t-coefficients, width fE
    std::uint64_t tmp[12];
    for (int i = 0; i < e_; ++i)
        for (int j = 0; j < e_; ++j) {
            u_mul(a.v.data() + i * w, b.v.data() + j * w, tmp);
            for (int s = 0; s < w; ++s) prod[i + j][s] = addmod(prod[i + j][s], tmp[s]);
        }
    for (int d = 2 * e_ - 2; d >= e_; --d) {
        std::uint64_t* cd = prod[d];
        bool nz = false;
        for (int s = 0; s < w; ++s)
            if (cd[s]) nz = true;
        if (!nz) continue;
        for (int k = 0; k < e_; ++k) {
            u_mul(cd, eis_tail_[k].v.data(), tmp);
            for (int s = 0; s < w; ++s)
                prod[d - e_ + k][s] = addmod(prod[d - e_ + k][s], tmp[s]);
        }
        for (int s = 0; s < w; ++s) cd[s] = 0;
    }
    for (int k = 0; k < e_; ++k)
        for (int s = 0; s < w; ++s) out.v[k * w + s] = prod[k][s];
}

bool LocalRing::c_is_zero(const Coords& a) const {
    int n = ncoords();
    for (int i = 0; i < n; ++i)
        if (a.v[i]) return false;
    return true;
}

int LocalRing::c_valuation(const Coords& a) const {
    int best = kValInf;
    for (int k = 0; k < e_; ++k)
        for (int s = 0; s < fE_; ++s) {
            std::uint64_t x = a.v[k * fE_ + s];
            if (!x) continue;
            int vp = 0;
            while (x % spec_.p == 0) { x /= spec_.p; ++vp; }
            int v = e_ * vp + k;
            if (v < best) best = v;
        }
    return best;
}

// ------------------------------------------------------------------------
// element level

RingElem LocalRing::zero() const { return RingElem(shared_from_this(), 0, Coords{}); }

RingElem LocalRing::one() const {
    Coords c{};
    c.v[0] = 1;
    return RingElem(shared_from_this(), 0, c);
}

RingElem LocalRing::from_int(long long a) const {
    long long m = static_cast<long long>(pmod_);
    long long r = ((a % m) + m) % m;
    Coords c{};
    c.v[0] = static_cast<std::uint64_t>(r);
    return RingElem(shared_from_this(), 0, c);
}

RingElem LocalRing::pi() const {
    Coords c{};
    if (e_ == 1)
        c.v[0] = static_cast<std::uint64_t>(spec_.p) % pmod_;
    else
        c.v[fE_] = 1;  // t
    return RingElem(shared_from_this(), 0, c);
}

RingElem LocalRing::pi_pow(int k) const {
    if (k >= 0) {
        RingElem r = one();
        for (int i = 0; i < k; ++i) r = mul(r, pi());
        return r;
    }
    Coords c{};
    c.v[0] = 1;
    return RingElem(shared_from_this(), -k, c);
}

RingElem LocalRing::omega() const {
    if (!spec_.quadratic) throw SpecError("omega only exists in the quadratic extension");
    Coords c{};
    c.v[spec_.f0] = 1;
    return RingElem(shared_from_this(), 0, c);
}

RingElem LocalRing::from_coords(int denom, const Coords& c) const {
    Coords r = c;
    int n = ncoords();
    for (int i = 0; i < n; ++i) r.v[i] %= pmod_;
    return normalize(RingElem(shared_from_this(), denom, r));
}

RingElem LocalRing::random_integral(std::mt19937_64& rng, int height) const {
    int h = std::min(height, M_);
    std::uint64_t m = 1;
    for (int i = 0; i < h; ++i) m *= static_cast<std::uint64_t>(spec_.p);
    Coords c{};
    int n = ncoords();
    for (int i = 0; i < n; ++i) c.v[i] = rng() % m;
    return RingElem(shared_from_this(), 0, c);
}

RingElem LocalRing::random_unit(std::mt19937_64& rng, int height) const {
    for (int tries = 0; tries < 256; ++tries) {
        RingElem a = random_integral(rng, height);
        if (valuation(a) == 0) return a;
    }
    throw PrecisionError("failed to sample a unit");
}

RingElem LocalRing::add(const RingElem& a, const RingElem& b) const {
    int k = std::max(a.denom(), b.denom());
    Coords ca = a.coords(), cb = b.coords();
    // scale by pi^(k - denom)
    auto scale = [&](Coords& c, int j) {
        RingElem t(shared_from_this(), 0, c);
        for (int i = 0; i < j; ++i) t = mul_pi(t);
        c = t.coords();
    };
    if (k > a.denom()) scale(ca, k - a.denom());
    if (k > b.denom()) scale(cb, k - b.denom());
    Coords out{};
    c_add(ca, cb, out);
    return normalize(RingElem(shared_from_this(), k, out));
}

RingElem LocalRing::sub(const RingElem& a, const RingElem& b) const { return add(a, neg(b)); }

RingElem LocalRing::neg(const RingElem& a) const {
    Coords out{};
    c_neg(a.coords(), out);
    return RingElem(shared_from_this(), a.denom(), out);
}

RingElem LocalRing::mul(const RingElem& a, const RingElem& b) const {
    Coords out{};
    c_mul(a.coords(), b.coords(), out);
    return normalize(RingElem(shared_from_this(), a.denom() + b.denom(), out));
}

RingElem LocalRing::normalize(const RingElem& a) const {
    if (a.denom() == 0) return a;
    Coords c = a.coords();
    if (c_is_zero(c)) return RingElem(shared_from_this(), 0, c);
    int k = a.denom();
    while (k > 0) {
        // strip one pi if the coordinates are divisible
        if (c_valuation(c) < 1) break;
        Coords q{};
        if (!c_div_pi(c, q)) break;
        c = q;
        --k;
    }
    return RingElem(shared_from_this(), k, c);
}

int LocalRing::valuation(const RingElem& a) const {
    int v = c_valuation(a.coords());
    if (v >= requested_N_) return kValInf;  // zero at working precision
    return v - a.denom();
}

RingElem LocalRing::sigma(const RingElem& a) const {
    if (!spec_.quadratic) throw SpecError("sigma requires the quadratic extension");
    Coords c = a.coords();
    for (int k = 0; k < e_; ++k)
        for (int i = 0; i < spec_.f0; ++i) {
            std::uint64_t& x = c.v[k * fE_ + spec_.f0 + i];
            x = x ? pmod_ - x : 0;
        }
    return RingElem(shared_from_this(), a.denom(), c);
}

bool LocalRing::in_base_field(const RingElem& a) const {
    if (!spec_.quadratic) return true;
    return equal(a, sigma(a));
}

// multiply the integral coordinate block by pi (exact, no denominators)
RingElem LocalRing::mul_pi(const RingElem& a) const {
    Coords out{};
    c_mul(a.coords(), pi().coords(), out);
    return RingElem(shared_from_this(), a.denom(), out);
}

// divide integral coordinates by pi; false if inexact
bool LocalRing::c_div_pi(const Coords& c, Coords& out) const {
    int w = fE_;
    if (e_ == 1) {
        for (int s = 0; s < w; ++s) {
            if (c.v[s] % spec_.p) return false;
            out.v[s] = c.v[s] / spec_.p;
        }
        return true;
    }
    // c = c_0 + c_1 t + ... : result = (c_0/p) * (p/pi) + sum_{k>=1} c_k t^{k-1}
    std::uint64_t c0p[12];
    for (int s = 0; s < w; ++s) {
        if (c.v[s] % spec_.p) return false;
        c0p[s] = c.v[s] / spec_.p;
    }
    Coords shifted{};
    for (int k = 1; k < e_; ++k)
        for (int s = 0; s < w; ++s) shifted.v[(k - 1) * w + s] = c.v[k * w + s];
    Coords c0e{};
    for (int s = 0; s < w; ++s) c0e.v[s] = c0p[s];
    Coords prod{};
    c_mul(c0e, p_div_pi_, prod);
    c_add(prod, shifted, out);
    return true;
}

RingElem LocalRing::div_by_pi(const RingElem& a) const {
    if (a.denom() > 0) return RingElem(shared_from_this(), a.denom() + 1, a.coords());
    Coords out{};
    if (!c_div_pi(a.coords(), out))
        throw InexactDivision("division by the uniformizer is not exact");
    return RingElem(shared_from_this(), 0, out);
}

RingElem LocalRing::inverse(const RingElem& a) const {
    int v = valuation(a);
    if (v >= kValInf) throw PrecisionError("cannot invert an element that is zero at working precision");
    // peel the uniformizer: a = pi^(w - k) * unit
    Coords c = a.coords();
    int w = c_valuation(c);
    for (int i = 0; i < w; ++i) {
        Coords q{};
        if (!c_div_pi(c, q)) throw InexactDivision("unit-part extraction failed");
        c = q;
    }
    // Newton iteration on the unit part, seeded from the residue field
    RingElem u(shared_from_this(), 0, c);
    unsigned long long fermat = static_cast<unsigned long long>(qres_) - 2;
    RingElem z = one();
    {
        RingElem base = u;
        unsigned long long e2 = fermat;
        while (e2) {
            if (e2 & 1) z = mul(z, base);
            base = mul(base, base);
            e2 >>= 1;
        }
    }
    int iters = 2;
    for (int t = 1; t < e_ * M_; t *= 2) ++iters;
    RingElem two = from_int(2);
    for (int i = 0; i < iters; ++i) z = mul(z, sub(two, mul(u, z)));
    if (!equal(mul(u, z), one())) throw PrecisionError("inversion did not converge");
    // a^{-1} = pi^{k - w} * z
    int shift = a.denom() - w;
    if (shift >= 0) {
        RingElem r = z;
        for (int i = 0; i < shift; ++i) r = mul_pi(r);
        return RingElem(shared_from_this(), 0, r.coords());
    }
    return RingElem(shared_from_this(), -shift, z.coords());
}

RingElem LocalRing::div_exact(const RingElem& a, const RingElem& b) const {
    int vb = valuation(b);
    if (vb >= kValInf) throw PrecisionError("division by zero at working precision");
    RingElem r = mul(a, inverse(b));
    if (r.denom() > a.denom())
        throw InexactDivision("exact division failed");
    return r;
}

RingElem LocalRing::canonical_mod(const RingElem& a, long long s) const {
    RingElem n = normalize(a);
    long long m = s + n.denom();
    if (m <= 0) return zero();
    Coords c = n.coords();
    Coords out{};
    for (int k = 0; k < e_; ++k) {
        long long depth = (m - k + e_ - 1) / e_;  // digits of the t^k coefficient kept
        if (depth <= 0) continue;
        if (depth > M_) depth = M_;
        std::uint64_t mod = 1;
        for (long long i = 0; i < depth; ++i) mod *= static_cast<std::uint64_t>(spec_.p);
        for (int sft = 0; sft < fE_; ++sft) out.v[k * fE_ + sft] = c.v[k * fE_ + sft] % mod;
    }
    return normalize(RingElem(shared_from_this(), n.denom(), out));
}

RingElem LocalRing::teichmuller(const RingElem& a) const {
    if (a.denom() != 0) throw SpecError("teichmuller lift needs an integral element");
    RingElem z = a;
    for (int round = 0; round < e_ * M_ + 2; ++round) {
        RingElem base = z, r = one();
        unsigned long long e2 = static_cast<unsigned long long>(qres_);
        while (e2) {
            if (e2 & 1) r = mul(r, base);
            base = mul(base, base);
            e2 >>= 1;
        }
        if (equal(r, z)) return z;
        z = r;
    }
    throw PrecisionError("teichmuller iteration did not stabilize");
}

RingElem LocalRing::coerce(const RingElem& a, const RingPtr& target) const {
    const LocalRing& T = *target;
    if (T.spec_.p != spec_.p || T.spec_.f0 != spec_.f0 || T.spec_.eis != spec_.eis)
        throw SpecError("coercion requires matching base field data");
    Coords out{};
    if (T.spec_.quadratic == spec_.quadratic) {
        for (int i = 0; i < ncoords(); ++i) out.v[i] = a.coords().v[i] % T.pmod_;
        return T.normalize(RingElem(target, a.denom(), out));
    }
    if (!spec_.quadratic && T.spec_.quadratic) {
        for (int k = 0; k < e_; ++k)
            for (int i = 0; i < spec_.f0; ++i)
                out.v[k * T.fE_ + i] = a.coords().v[k * fE_ + i] % T.pmod_;
        return T.normalize(RingElem(target, a.denom(), out));
    }
    // E -> E0: the sigma-fixed part must be exact
    if (!in_base_field(a)) throw SpecError("element does not lie in the base field");
    for (int k = 0; k < e_; ++k)
        for (int i = 0; i < spec_.f0; ++i)
            out.v[k * T.fE_ + i] = a.coords().v[k * fE_ + i] % T.pmod_;
    return T.normalize(RingElem(target, a.denom(), out));
}

std::vector<std::uint64_t> LocalRing::residue(const RingElem& a) const {
    RingElem n = normalize(a);
    if (n.denom() != 0) throw PrecisionError("residue of a non-integral element");
    std::vector<std::uint64_t> r(fE_);
    for (int i = 0; i < fE_; ++i) r[i] = n.coords().v[i] % static_cast<std::uint64_t>(spec_.p);
    return r;
}

bool LocalRing::residue_is_zero(const RingElem& a) const {
    return valuation(a) >= 1;
}

std::vector<RingElem> LocalRing::norm_one_residues() const {
    if (!spec_.quadratic) throw SpecError("norm-one residues require the quadratic extension");
    std::vector<RingElem> out;
    // enumerate residue classes and keep those with a^(q+1) = 1 in the residue field
    long long total = qres_;
    RingElem half = inverse(from_int(2));
    for (long long code = 1; code < total; ++code) {
        Coords c{};
        long long t = code;
        for (int i = 0; i < fE_; ++i) {
            c.v[i] = static_cast<std::uint64_t>(t % spec_.p);
            t /= spec_.p;
        }
        RingElem a(shared_from_this(), 0, c);
        // residue-level test: a^(q+1) == 1 mod pi
        RingElem pw = one(), base = a;
        long long e2 = q_ + 1;
        while (e2) {
            if (e2 & 1) pw = mul(pw, base);
            base = mul(base, base);
            e2 >>= 1;
        }
        if (!is_zero(canonical_mod(sub(pw, one()), 1))) continue;
        // Hensel refinement: a <- a (1 - r/2) with r = a sigma(a) - 1
        bool ok = false;
        for (int it = 0; it < 64; ++it) {
            RingElem r = sub(mul(a, sigma(a)), one());
            if (is_zero(r)) { ok = true; break; }
            a = mul(a, sub(one(), mul(r, half)));
        }
        if (!ok) throw PrecisionError("norm-one refinement did not converge");
        out.push_back(a);
    }
    if (static_cast<long long>(out.size()) != q_ + 1)
        throw PrecisionError("norm-one residue count mismatch");
    return out;
}

std::string LocalRing::to_string(const RingElem& a) const {
    std::ostringstream os;
    if (a.denom() > 0) os << "pi^-" << a.denom() << "*(";
    bool first = true;
    for (int k = 0; k < e_; ++k)
        for (int j = 0; j < (spec_.quadratic ? 2 : 1); ++j)
            for (int i = 0; i < spec_.f0; ++i) {
                std::uint64_t c = a.coords().v[k * fE_ + j * spec_.f0 + i];
                if (!c) continue;
                if (!first) os << " + ";
                first = false;
                os << c;
                if (i) os << "*x^" << i;
                if (j) os << "*w";
                if (k) os << "*t^" << k;
            }
    if (first) os << "0";
    if (a.denom() > 0) os << ")";
    return os.str();
}

// operator sugar
RingElem RingElem::operator+(const RingElem& o) const { return ring_->add(*this, o); }
RingElem RingElem::operator-(const RingElem& o) const { return ring_->sub(*this, o); }
RingElem RingElem::operator*(const RingElem& o) const { return ring_->mul(*this, o); }
RingElem RingElem::operator-() const { return ring_->neg(*this); }
bool RingElem::operator==(const RingElem& o) const { return ring_->equal(*this, o); }

}  // namespace orbilat
