#include "orbilat/witt_checks.hpp"

#include <chrono>
#include <sstream>

#include "orbilat/window.hpp"
#include "orbilat/witt.hpp"

namespace orbilat {

namespace {

long long now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Reporter {
    std::vector<CheckReport> reports;
    void add(const std::string& id, bool pass, const std::string& lhs = "",
             const std::string& rhs = "", long long ms = 0) {
        CheckReport r;
        r.identity = id;
        r.pass = pass;
        r.lhs = lhs;
        r.rhs = rhs;
        r.millis = ms;
        reports.push_back(std::move(r));
    }
};

WittVec random_vec(const WittRingPtr& W, std::mt19937_64& rng, int len = -1) {
    if (len < 0) len = W->m();
    std::vector<RingElem> c;
    for (int i = 0; i < len; ++i) c.push_back(W->coeff_ring()->random_integral(rng, 3));
    return W->from_coords(c);
}

WittVec random_unit_w(const WittRingPtr& W, std::mt19937_64& rng) {
    const RingPtr& R = W->coeff_ring();
    std::vector<RingElem> c;
    c.push_back(R->random_unit(rng, 2));
    for (int i = 1; i < W->m(); ++i) c.push_back(R->random_integral(rng, 2));
    return W->from_coords(c);
}

void ghost_and_fv_checks(Reporter& rep, long long p, int m, std::mt19937_64& rng) {
    long long t0 = now_ms();
    auto R = make_ring(FieldSpec{p, 1, {}, false}, 8);
    auto W = WittRing::make(R, R->from_int(p), p, m);
    bool hom = true, fv = true, vproj = true, teich = true;
    for (int it = 0; it < 6; ++it) {
        WittVec x = random_vec(W, rng), y = random_vec(W, rng);
        auto gx = W->ghost(x), gy = W->ghost(y);
        auto gs = W->ghost(W->add(x, y)), gp = W->ghost(W->mul(x, y));
        for (int n = 0; n < m; ++n) {
            if (!R->equal(gs[n], gx[n] + gy[n])) hom = false;
            if (!R->equal(gp[n], gx[n] * gy[n])) hom = false;
        }
        if (!W->eq(W->frobenius(W->verschiebung(x)), W->mul(W->scalar(W->pi()), x), m - 1))
            fv = false;
        if (!W->eq(W->verschiebung(W->mul(x, W->frobenius(y))), W->mul(W->verschiebung(x), y)))
            vproj = false;
        RingElem a = R->random_integral(rng, 2), b = R->random_integral(rng, 2);
        if (!W->eq(W->mul(W->teichmuller(a), W->teichmuller(b)), W->teichmuller(a * b)))
            teich = false;
    }
    std::ostringstream id;
    id << "witt-ghost-homomorphism p=" << p << " m=" << m;
    rep.add(id.str(), hom && fv && vproj && teich,
            "ghost(+,*) componentwise; FV=pi; V(x F y)=V(x)y; [ab]=[a][b]", "all exact",
            now_ms() - t0);
}

void frame_checks(Reporter& rep, long long p, const std::vector<long long>& eis,
                  std::mt19937_64& rng) {
    long long t0 = now_ms();
    int e = eis.empty() ? 1 : static_cast<int>(eis.size()) - 1;
    std::ostringstream id;
    id << "lubin-tate-frame p=" << p << " e=" << e;
    try {
        auto R = eis.empty() ? make_ring(FieldSpec{p, 1, {}, false}, 8)
                             : make_ring(FieldSpec{p, 1, eis, false}, 8);
        auto W = WittRing::make(R, R->from_int(p), p, 3);
        LTFrame F = make_lt_frame(W, eis, eis.empty() ? R->from_int(p) : R->pi());
        const TensorRing& T = F.T;
        bool pass = true;
        std::string note;
        if (theta_image_valuation(F) != e - 1) {
            pass = false;
            note += " theta-image-valuation";
        }
        if (!t_is_unit(T, F.kappa)) {
            pass = false;
            note += " kappa-unit";
        }
        // frame relation and Remark-12.8 element
        TensorElem sv1 = frame_sigma_dot(F, t_versch(T, t_one(T)));
        TensorElem s = t_mul(T, t_inverse(T, F.kappa), t_sigma(T, F.xi0));
        for (int it = 0; it < 4; ++it) {
            TensorElem xi_i = t_versch(T, t_random(T, rng, W->m() - 1));
            if (!t_eq(T, frame_sigma_dot(F, xi_i), t_mul(T, t_versch_inv(T, xi_i), sv1), W->m() - 1))
                pass = false;
            TensorElem xi = t_add(T, xi_i, t_mul(T, F.xi0, t_random(T, rng)));
            if (!t_eq(T, t_sigma(T, xi), t_mul(T, s, frame_sigma_dot(F, xi)), W->m() - 1))
                pass = false;
        }
        // rank-one conversion round trip
        TensorElem kp = t_mul(T, t_add(T, t_one(T), t_versch(T, t_random(T, rng, W->m() - 1))),
                              F.kappa);
        RankOneDisplay D;
        D.fdot_xi0 = kp;
        D.f1 = lt_display_f1(F, kp);
        RankOneDisplay D2 = convert_from_window_op(F, convert_to_window_op(F, D));
        if (!t_eq(T, D2.f1, D.f1, W->m() - 1) || !t_eq(T, D2.fdot_xi0, D.fdot_xi0, W->m() - 1))
            pass = false;
        rep.add(id.str(), pass, "theta valuation e-1; kappa unit; frame relation; round trip",
                note.empty() ? "exact" : note, now_ms() - t0);
    } catch (const std::exception& ex) {
        rep.add(id.str(), false, "", std::string("error: ") + ex.what(), now_ms() - t0);
    }
}

void canonical_unit_check(Reporter& rep, long long p) {
    long long t0 = now_ms();
    auto R = make_ring(FieldSpec{p, 1, {}, false}, 8);
    auto W = WittRing::make(R, R->from_int(p), p, 4);
    LTFrame F = make_lt_frame(W, {}, R->from_int(p));
    WittVec eps = F.kappa.comp[0];
    auto g = W->ghost(eps);
    bool pass = R->is_zero(R->canonical_mod(eps.c[0] - R->one(), 1));
    for (int n = 0; n + 1 < W->m(); ++n) {
        long long e = 1;
        for (int i = 0; i < n + 1; ++i) e *= p;
        RingElem pp = R->one();
        for (long long i = 0; i < e - 1; ++i) pp = pp * R->from_int(p);
        if (!R->equal(g[n], R->one() - pp)) pass = false;
    }
    std::ostringstream id;
    id << "witt-frame-canonical-unit p=" << p;
    rep.add(id.str(), pass, "ghost_n = 1 - pi^{q^{n+1}-1}; unit is 1 mod pi", "exact",
            now_ms() - t0);
}

void window_checks(Reporter& rep, long long p, std::mt19937_64& rng) {
    long long t0 = now_ms();
    auto R = make_ring(FieldSpec{p, 1, {}, false}, 8);
    auto W = WittRing::make(R, R->from_int(p), p, 4);
    bool pass = true;
    std::string note;
    for (int rank = 1; rank <= 2; ++rank)
        for (int rL = 0; rL <= rank; ++rL) {
            WMat phi;
            phi.n = rank;
            bool got = false;
            for (int t = 0; t < 100 && !got; ++t) {
                phi.a.clear();
                for (int i = 0; i < rank * rank; ++i) phi.a.push_back(random_vec(W, rng));
                try {
                    (void)wmat_inverse(W, phi);
                    got = true;
                } catch (const SpecError&) {
                }
            }
            if (!got) {
                pass = false;
                continue;
            }
            Window win = make_window(W, rank, rL, phi);
            auto pc = pairing_check(win, rng, 3);
            if (!pc.pass) {
                pass = false;
                note += " pairing(" + std::to_string(rank) + "," + std::to_string(rL) + ")";
            }
            auto strict = epsilon_twist_check(win, W->one(), rng, 2);
            auto twisted = epsilon_twist_check(win, random_unit_w(W, rng), rng, 2);
            if (!strict.pass || !twisted.pass) {
                pass = false;
                note += " twist";
            }
        }
    std::ostringstream id;
    id << "window-duality p=" << p;
    rep.add(id.str(), pass, "pairing identity; double dual; epsilon twist",
            note.empty() ? "exact" : note, now_ms() - t0);
}

void tower_check(Reporter& rep, std::mt19937_64& rng) {
    long long t0 = now_ms();
    auto R = make_ring(FieldSpec{3, 1, {-3, 0, 1}, false}, 10);
    auto Wsrc = WittRing::make(R, R->from_int(3), 3, 4);
    auto Wtgt = WittRing::make(R, R->pi(), 3, 4);
    bool pass = true;
    for (int it = 0; it < 4; ++it) {
        WittVec x = random_vec(Wsrc, rng), y = random_vec(Wsrc, rng);
        if (!Wtgt->eq(base_morphism(Wsrc, Wtgt, Wsrc->mul(x, y)),
                      Wtgt->mul(base_morphism(Wsrc, Wtgt, x), base_morphism(Wsrc, Wtgt, y))))
            pass = false;
        auto gs = Wsrc->ghost(x);
        auto gt = Wtgt->ghost(base_morphism(Wsrc, Wtgt, x));
        for (int n = 0; n < 4; ++n)
            if (!R->equal(gs[n], gt[n])) pass = false;
    }
    // strict frame morphism
    LTFrame F = make_lt_frame(Wsrc, {-3, 0, 1}, R->pi());
    TensorRing Ttgt = make_tensor_ring(Wtgt, {}, R->pi());
    auto alpha_tensor = [&](const TensorElem& x) {
        TensorElem out = t_zero(Ttgt, Wtgt->m());
        RingElem pw = R->one();
        for (int k = 0; k < F.T.e; ++k) {
            WittVec mapped = base_morphism(Wsrc, Wtgt, x.comp[k]);
            out.comp[0] = Wtgt->add(out.comp[0], Wtgt->mul(Wtgt->scalar(pw), mapped));
            pw = pw * R->pi();
        }
        return out;
    };
    TensorElem kappa_t = alpha_tensor(F.kappa);
    TensorElem theta_t = t_one(Ttgt);
    for (int it = 0; it < 3; ++it) {
        TensorElem xi = t_add(F.T, t_versch(F.T, t_random(F.T, rng, Wsrc->m() - 1)),
                              t_mul(F.T, F.xi0, t_random(F.T, rng)));
        TensorElem lhs = alpha_tensor(frame_sigma_dot(F, xi));
        TensorElem rhs = frame_sigma_dot_kappa(Ttgt, kappa_t, theta_t, alpha_tensor(xi));
        if (!t_eq(Ttgt, lhs, rhs, Wtgt->m() - 2)) pass = false;
    }
    rep.add("witt-base-morphism-tower", pass,
            "ghost-preserving ring map; strict frame morphism on generators", "exact",
            now_ms() - t0);
}

}  // namespace

std::vector<CheckReport> witt_suite(unsigned long long seed) {
    std::mt19937_64 rng(seed * 0x2545f4914f6cdd1dULL + 3);
    Reporter rep;
    for (long long p : {3LL, 5LL}) {
        ghost_and_fv_checks(rep, p, 4, rng);
        canonical_unit_check(rep, p);
        frame_checks(rep, p, {}, rng);                           // e = 1
        frame_checks(rep, p, {-p, 0, 1}, rng);                   // e = 2
        frame_checks(rep, p, {-p, -p, 0, 1}, rng);               // e = 3
        window_checks(rep, p, rng);
    }
    tower_check(rep, rng);
    return rep.reports;
}

}  // namespace orbilat
