#include "orbilat/residue_poly.hpp"

#include <algorithm>

namespace orbilat {
namespace respoly {

RPoly reduce(const RingPtr& R, RPoly f) {
    for (auto& c : f) c = R->canonical_mod(c, 1);
    while (!f.empty() && R->is_zero(f.back())) f.pop_back();
    return f;
}

int degree(const RPoly& f) { return static_cast<int>(f.size()) - 1; }

bool is_zero(const RPoly& f) { return f.empty(); }

RPoly add(const RingPtr& R, const RPoly& f, const RPoly& g) {
    RPoly h(std::max(f.size(), g.size()), R->zero());
    for (std::size_t i = 0; i < f.size(); ++i) h[i] = h[i] + f[i];
    for (std::size_t i = 0; i < g.size(); ++i) h[i] = h[i] + g[i];
    return reduce(R, h);
}

RPoly sub(const RingPtr& R, const RPoly& f, const RPoly& g) {
    RPoly h(std::max(f.size(), g.size()), R->zero());
    for (std::size_t i = 0; i < f.size(); ++i) h[i] = h[i] + f[i];
    for (std::size_t i = 0; i < g.size(); ++i) h[i] = h[i] - g[i];
    return reduce(R, h);
}

RPoly mul(const RingPtr& R, const RPoly& f, const RPoly& g) {
    if (f.empty() || g.empty()) return {};
    RPoly h(f.size() + g.size() - 1, R->zero());
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) h[i + j] = h[i + j] + f[i] * g[j];
    return reduce(R, h);
}

RPoly monic(const RingPtr& R, const RPoly& f) {
    if (f.empty()) return f;
    RingElem inv = R->inverse(f.back());
    RPoly g = f;
    for (auto& c : g) c = c * inv;
    return reduce(R, g);
}

void divmod(const RingPtr& R, const RPoly& f, const RPoly& g, RPoly& q, RPoly& r) {
    if (g.empty()) throw SpecError("residue polynomial division by zero");
    r = reduce(R, f);
    q.assign(f.size(), R->zero());
    RingElem lead_inv = R->inverse(g.back());
    while (degree(r) >= degree(g)) {
        int shift = degree(r) - degree(g);
        RingElem c = r.back() * lead_inv;
        q[shift] = q[shift] + c;
        RPoly t(shift, R->zero());
        t.push_back(c);
        r = sub(R, r, mul(R, t, g));
    }
    q = reduce(R, q);
}

RPoly gcd(const RingPtr& R, RPoly f, RPoly g) {
    f = reduce(R, std::move(f));
    g = reduce(R, std::move(g));
    while (!g.empty()) {
        RPoly q, r;
        divmod(R, f, g, q, r);
        f = g;
        g = r;
    }
    return monic(R, f);
}

RPoly powmod(const RingPtr& R, RPoly base, long long e, const RPoly& mod) {
    RPoly q, r;
    divmod(R, base, mod, q, base);
    RPoly acc{R->one()};
    while (e) {
        if (e & 1) {
            acc = mul(R, acc, base);
            divmod(R, acc, mod, q, acc);
        }
        base = mul(R, base, base);
        divmod(R, base, mod, q, base);
        e >>= 1;
    }
    return acc;
}

RPoly derivative(const RingPtr& R, const RPoly& f) {
    RPoly d;
    for (std::size_t i = 1; i < f.size(); ++i) d.push_back(R->from_int(static_cast<long long>(i)) * f[i]);
    return reduce(R, d);
}

RingElem eval(const RingPtr& R, const RPoly& f, const RingElem& x) {
    RingElem acc = R->zero();
    for (std::size_t i = f.size(); i-- > 0;) acc = R->canonical_mod(acc * x + f[i], 1);
    return acc;
}

namespace {

// all residue-field elements of the ring
std::vector<RingElem> residue_elements(const RingPtr& R) {
    std::vector<RingElem> out;
    long long total = R->residue_size();
    for (long long code = 0; code < total; ++code) {
        Coords c{};
        long long t = code;
        for (int i = 0; i < R->width(); ++i) {
            c.v[i] = static_cast<std::uint64_t>(t % R->p());
            t /= R->p();
        }
        out.push_back(R->from_coords(0, c));
    }
    return out;
}

}  // namespace

std::vector<std::pair<RPoly, int>> factor(const RingPtr& R, const RPoly& f0) {
    RPoly f = monic(R, reduce(R, f0));
    if (degree(f) > 4) throw SpecError("residue factorization supported up to degree 4");
    std::vector<std::pair<RPoly, int>> out;
    auto push = [&](const RPoly& irr) {
        for (auto& [g, m] : out)
            if (g.size() == irr.size()) {
                bool same = true;
                for (std::size_t i = 0; i < g.size(); ++i)
                    if (g[i] != irr[i]) same = false;
                if (same) { ++m; return; }
            }
        out.emplace_back(irr, 1);
    };
    auto elems = residue_elements(R);
    // strip linear factors
    bool progress = true;
    while (degree(f) > 0 && progress) {
        progress = false;
        for (const auto& z : elems) {
            if (!R->is_zero(eval(R, f, z))) continue;
            RPoly lin{-z, R->one()};
            RPoly q, r;
            divmod(R, f, lin, q, r);
            if (!is_zero(r)) throw PrecisionError("root division failed");
            push(lin);
            f = q;
            progress = true;
            break;
        }
    }
    int d = degree(f);
    if (d == 0) return out;
    if (d == 2 || d == 3) {  // no roots left: irreducible
        push(f);
        return out;
    }
    if (d == 4) {
        // either irreducible or a product of two irreducible quadratics
        for (const auto& b : elems)
            for (const auto& c : elems) {
                RPoly quad{c, b, R->one()};
                RPoly q, r;
                divmod(R, f, quad, q, r);
                if (!is_zero(r)) continue;
                // both quadratics must be irreducible here (no linear factors remain)
                push(quad);
                push(q);
                return out;
            }
        push(f);
        return out;
    }
    throw SpecError("unexpected residual degree");
}

void ext_gcd(const RingPtr& R, RPoly f, RPoly g0, RPoly& g, RPoly& u, RPoly& v) {
    RPoly r0 = reduce(R, std::move(f)), r1 = reduce(R, std::move(g0));
    RPoly s0{R->one()}, s1{};
    RPoly t0{}, t1{R->one()};
    while (!r1.empty()) {
        RPoly q, r;
        divmod(R, r0, r1, q, r);
        RPoly s2 = sub(R, s0, mul(R, q, s1));
        RPoly t2 = sub(R, t0, mul(R, q, t1));
        r0 = r1; r1 = r;
        s0 = s1; s1 = s2;
        t0 = t1; t1 = t2;
    }
    // normalize to monic gcd
    if (!r0.empty()) {
        RingElem inv = R->inverse(r0.back());
        for (auto& c : r0) c = c * inv;
        for (auto& c : s0) c = c * inv;
        for (auto& c : t0) c = c * inv;
    }
    g = reduce(R, r0);
    u = reduce(R, s0);
    v = reduce(R, t0);
}

}  // namespace respoly
}  // namespace orbilat
