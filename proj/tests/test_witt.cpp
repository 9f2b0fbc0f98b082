#include "doctest.h"
#include "orbilat/witt.hpp"

#include <random>

using namespace orbilat;

namespace {

RingPtr zp(long long p, int N = 8) { return make_ring(FieldSpec{p, 1, {}, false}, N); }

WittRingPtr wring(long long p, int m, int N = 8) {
    auto R = zp(p, N);
    return WittRing::make(R, R->from_int(p), p, m);
}

WittVec random_vec(const WittRingPtr& W, std::mt19937_64& rng, int len = -1) {
    if (len < 0) len = W->m();
    std::vector<RingElem> c;
    for (int i = 0; i < len; ++i) c.push_back(W->coeff_ring()->random_integral(rng, 3));
    return W->from_coords(c);
}

}  // namespace

TEST_CASE("ghost map is a ring homomorphism") {
    std::mt19937_64 rng(201);
    for (long long p : {3LL, 5LL}) {
        auto W = wring(p, 4);
        const RingPtr& R = W->coeff_ring();
        for (int it = 0; it < 8; ++it) {
            WittVec x = random_vec(W, rng), y = random_vec(W, rng);
            auto gx = W->ghost(x), gy = W->ghost(y);
            auto gsum = W->ghost(W->add(x, y));
            auto gprod = W->ghost(W->mul(x, y));
            for (int n = 0; n < 4; ++n) {
                CHECK(R->equal(gsum[n], gx[n] + gy[n]));
                CHECK(R->equal(gprod[n], gx[n] * gy[n]));
            }
            // round trip through ghosts
            CHECK(W->eq(W->from_ghost(gx), x));
        }
    }
}

TEST_CASE("Teichmueller, Frobenius, Verschiebung identities") {
    std::mt19937_64 rng(203);
    auto W = wring(3, 4);
    const RingPtr& R = W->coeff_ring();
    CHECK(W->eq(W->teichmuller(R->one()), W->one()));
    for (int it = 0; it < 8; ++it) {
        RingElem a = R->random_integral(rng, 3);
        RingElem b = R->random_integral(rng, 3);
        // [ab] = [a][b]
        CHECK(W->eq(W->mul(W->teichmuller(a), W->teichmuller(b)), W->teichmuller(a * b)));
        // F([a]) = [a^q]
        CHECK(W->eq(W->frobenius(W->teichmuller(a)), W->teichmuller(a * a * a), 3));
        WittVec x = random_vec(W, rng), y = random_vec(W, rng);
        // F(V(x)) = pi x
        CHECK(W->eq(W->frobenius(W->verschiebung(x)), W->mul(W->scalar(W->pi()), x), 3));
        // V(x F(y)) = V(x) y
        WittVec lhs = W->verschiebung(W->mul(x, W->frobenius(y)));
        WittVec rhs = W->mul(W->verschiebung(x), y);
        CHECK(W->eq(lhs, rhs));
        // ghost(V(x))_n = pi * ghost(x)_{n-1}
        auto gv = W->ghost(W->verschiebung(x));
        auto gx = W->ghost(x);
        CHECK(R->is_zero(gv[0]));
        for (int n = 1; n < W->m(); ++n) CHECK(R->equal(gv[n], R->from_int(3) * gx[n - 1]));
    }
    // F V = pi on the base scalar: F(V(1)) = pi
    CHECK(W->eq(W->frobenius(W->verschiebung(W->one())), W->scalar(W->pi()), 3));
}

TEST_CASE("structure polynomials match the classical laws and the pointwise path") {
    auto sp3 = structure_polys(3, 3, 3);
    // s_0 = x_0 + y_0
    CHECK(sp3.sum[0].terms.size() == 2);
    // s_1 = x_1 + y_1 - x_0^2 y_0 - x_0 y_0^2 for p = q = 3
    {
        const auto& s1 = sp3.sum[1];
        std::vector<std::uint16_t> x1(6, 0), y1(6, 0), m21(6, 0), m12(6, 0);
        x1[1] = 1;
        y1[4] = 1;
        m21[0] = 2;
        m21[3] = 1;
        m12[0] = 1;
        m12[3] = 2;
        REQUIRE(s1.terms.count(x1));
        REQUIRE(s1.terms.count(y1));
        REQUIRE(s1.terms.count(m21));
        REQUIRE(s1.terms.count(m12));
        CHECK(static_cast<long long>(s1.terms.at(x1)) == 1);
        CHECK(static_cast<long long>(s1.terms.at(y1)) == 1);
        CHECK(static_cast<long long>(s1.terms.at(m21)) == -1);
        CHECK(static_cast<long long>(s1.terms.at(m12)) == -1);
    }
    // p_0 = x_0 y_0
    CHECK(sp3.product[0].terms.size() == 1);

    // evaluation agrees with the pointwise ghost-solve arithmetic
    std::mt19937_64 rng(207);
    for (auto [p, m] : std::vector<std::pair<long long, int>>{{3, 3}, {5, 2}}) {
        auto polys = structure_polys(p, p, m);
        auto W = wring(p, m);
        for (int it = 0; it < 6; ++it) {
            WittVec x = random_vec(W, rng), y = random_vec(W, rng);
            std::vector<RingElem> xy;
            for (int i = 0; i < m; ++i) xy.push_back(x.c[i]);
            for (int i = 0; i < m; ++i) xy.push_back(y.c[i]);
            WittVec s = W->add(x, y), pr = W->mul(x, y);
            for (int n = 0; n < m; ++n) {
                CHECK(W->coeff_ring()->equal(struct_poly_eval(polys.sum[n], xy), s.c[n]));
                CHECK(W->coeff_ring()->equal(struct_poly_eval(polys.product[n], xy), pr.c[n]));
            }
        }
    }
    // the q = 5, m = 4 expansion exceeds any sane budget: hard error, not a hang
    CHECK_THROWS_AS(structure_polys(5, 5, 4, 10000), SpecError);
}

TEST_CASE("theta and kappa for the trivial extension") {
    // O' = O: theta = 1, kappa = the canonical Witt-frame unit
    auto R = zp(3, 10);
    auto W = WittRing::make(R, R->from_int(3), 3, 4);
    LTFrame F = make_lt_frame(W, {}, R->from_int(3));
    CHECK(theta_image_valuation(F) == 0);
    CHECK(t_is_unit(F.T, F.kappa));
    // epsilon = V^{-1}(pi - [pi]): ghost components 1 - pi^{q^{n+1} - 1}
    WittVec eps = F.kappa.comp[0];
    auto g = W->ghost(eps);
    for (int n = 0; n + 1 < W->m(); ++n) {
        long long e = 1;
        for (int i = 0; i < n + 1; ++i) e *= 3;
        RingElem expect = R->one();
        RingElem pp = R->one();
        for (long long i = 0; i < e - 1; ++i) pp = pp * R->from_int(3);
        expect = expect - pp;
        CHECK(R->equal(g[n], expect));
    }
    // epsilon is 1 mod pi
    CHECK(R->is_zero(R->canonical_mod(eps.c[0] - R->one(), 1)));
    // the frame sigma-dot with theta = 1 is V^{-1} itself
    std::mt19937_64 rng(211);
    WittVec w = random_vec(W, rng, 3);
    TensorElem xi = t_from_witt(F.T, W->verschiebung(w));
    CHECK(t_eq(F.T, frame_sigma_dot(F, xi), t_from_witt(F.T, w), 3));
}

TEST_CASE("theta image valuation is e - 1 across extensions") {
    struct Case {
        long long p;
        std::vector<long long> eis;
    };
    for (const auto& c : {Case{3, {-3, 0, 1}}, Case{3, {-3, -3, 0, 1}}, Case{5, {-5, 0, 1}},
                          Case{3, {3, 3, 1}}}) {
        auto R = make_ring(FieldSpec{c.p, 1, c.eis, false}, 9);
        auto W = WittRing::make(R, R->from_int(c.p), c.p, 3);
        LTFrame F = make_lt_frame(W, c.eis, R->pi());
        int e = static_cast<int>(c.eis.size()) - 1;
        CHECK(theta_image_valuation(F) == e - 1);
        CHECK(t_is_unit(F.T, F.kappa));
        // pi' * theta-image vanishes mod pi: valuation at least e
        CHECK(theta_image_valuation(F) + 1 >= e);
    }
}

TEST_CASE("frame axioms and the Remark-12.8 element") {
    std::mt19937_64 rng(213);
    for (auto eis : {std::vector<long long>{-3, 0, 1}, std::vector<long long>{-3, -3, 0, 1}}) {
        auto R = make_ring(FieldSpec{3, 1, eis, false}, 9);
        auto W = WittRing::make(R, R->from_int(3), 3, 3);
        LTFrame F = make_lt_frame(W, eis, R->pi());
        const TensorRing& T = F.T;
        // sigma-dot(xi0) = kappa
        CHECK(t_eq(T, frame_sigma_dot(F, F.xi0), F.kappa));
        // defining relation on V(1)
        TensorElem v1 = t_versch(T, t_one(T));
        TensorElem sv1 = frame_sigma_dot(F, v1);
        CHECK(t_eq(T, sv1, t_mul(T, t_versch_inv(T, v1), sv1), T.W->m() - 1));
        // on random elements of O' (x) I: sigma-dot(xi) = V^{-1}(xi) sigma-dot(V(1))
        for (int it = 0; it < 5; ++it) {
            TensorElem xi = t_versch(T, t_random(T, rng, T.W->m() - 1));
            TensorElem lhs = frame_sigma_dot(F, xi);
            TensorElem rhs = t_mul(T, t_versch_inv(T, xi), sv1);
            CHECK(t_eq(T, lhs, rhs, T.W->m() - 1));
            // sigma-linearity over the ring
            TensorElem w = t_random(T, rng);
            CHECK(t_eq(T, frame_sigma_dot(F, t_mul(T, w, xi)),
                       t_mul(T, t_sigma(T, w), frame_sigma_dot(F, xi)), T.W->m() - 1));
            // Remark-12.8 element s = kappa^{-1} sigma(xi0): sigma(xi) = s sigma-dot(xi)
            TensorElem s = t_mul(T, t_inverse(T, F.kappa), t_sigma(T, F.xi0));
            CHECK(t_eq(T, t_sigma(T, xi), t_mul(T, s, frame_sigma_dot(F, xi)), T.W->m() - 1));
            // also on the xi0-multiples
            TensorElem xi2 = t_mul(T, F.xi0, w);
            CHECK(t_eq(T, t_sigma(T, xi2), t_mul(T, s, frame_sigma_dot(F, xi2)), T.W->m() - 1));
        }
        // the decomposition-based sigma-dot agrees with V^{-1}(theta .)
        for (int it = 0; it < 4; ++it) {
            TensorElem xi = t_add(T, t_versch(T, t_random(T, rng, T.W->m() - 1)),
                                  t_mul(T, F.xi0, t_random(T, rng)));
            CHECK(t_eq(T, frame_sigma_dot_kappa(T, F.kappa, F.theta, xi), frame_sigma_dot(F, xi),
                       T.W->m() - 1));
        }
    }
}

TEST_CASE("display reconstruction from kappa") {
    std::mt19937_64 rng(217);
    auto R = make_ring(FieldSpec{3, 1, {-3, 0, 1}, false}, 9);
    auto W = WittRing::make(R, R->from_int(3), 3, 3);
    LTFrame F = make_lt_frame(W, {-3, 0, 1}, R->pi());
    const TensorRing& T = F.T;
    TensorElem f1 = lt_display_f1(F, F.kappa);
    // relation (12.2)-style overlap: Fdot on xi0 V(y) computed both ways
    for (int it = 0; it < 5; ++it) {
        TensorElem vy = t_versch(T, t_random(T, rng, T.W->m() - 1));
        TensorElem ov = t_mul(T, F.xi0, vy);
        TensorElem branch1 = t_mul(T, t_versch_inv(T, ov), f1);
        TensorElem branch2 = t_mul(T, t_sigma(T, vy), F.kappa);
        CHECK(t_eq(T, branch1, branch2, T.W->m() - 1));
    }
    // linearity in kappa: scaling by a unit scales F(1)
    TensorElem v = t_add(T, t_one(T), t_versch(T, t_random(T, rng, T.W->m() - 1)));
    TensorElem f1v = lt_display_f1(F, t_mul(T, v, F.kappa));
    CHECK(t_eq(T, f1v, t_mul(T, v, f1), T.W->m() - 1));
}

TEST_CASE("rank-one conversion round trip") {
    std::mt19937_64 rng(219);
    for (auto eis : {std::vector<long long>{-3, 0, 1}, std::vector<long long>{}}) {
        auto R = eis.empty() ? zp(3, 9) : make_ring(FieldSpec{3, 1, eis, false}, 9);
        auto W = WittRing::make(R, R->from_int(3), 3, 3);
        LTFrame F = make_lt_frame(W, eis, eis.empty() ? R->from_int(3) : R->pi());
        const TensorRing& T = F.T;
        // a display determined by a frame unit kappa_P
        TensorElem kp = t_mul(T, t_add(T, t_one(T), t_versch(T, t_random(T, rng, T.W->m() - 1))),
                              F.kappa);
        RankOneDisplay D;
        D.fdot_xi0 = kp;
        D.f1 = lt_display_f1(F, kp);
        TensorElem f1p = convert_to_window_op(F, D);
        RankOneDisplay D2 = convert_from_window_op(F, f1p);
        CHECK(t_eq(T, D2.fdot_xi0, D.fdot_xi0, T.W->m() - 1));
        CHECK(t_eq(T, D2.f1, D.f1, T.W->m() - 1));
        // naturality: scaling the operator scales the converted one
        TensorElem u = t_add(T, t_one(T), t_versch(T, t_random(T, rng, T.W->m() - 1)));
        RankOneDisplay Du;
        Du.fdot_xi0 = t_mul(T, u, D.fdot_xi0);
        Du.f1 = t_mul(T, u, D.f1);
        CHECK(t_eq(T, convert_to_window_op(F, Du), t_mul(T, u, f1p), T.W->m() - 1));
    }
}

TEST_CASE("base morphism along a ramified tower") {
    std::mt19937_64 rng(223);
    auto R = make_ring(FieldSpec{3, 1, {-3, 0, 1}, false}, 10);
    auto Wsrc = WittRing::make(R, R->from_int(3), 3, 4);   // W_O(R), O = Z_3
    auto Wtgt = WittRing::make(R, R->pi(), 3, 4);          // W_O'(R), O' = Z_3[sqrt 3]
    // alpha([a]) = [a]
    RingElem a = R->random_integral(rng, 3);
    CHECK(Wtgt->eq(base_morphism(Wsrc, Wtgt, Wsrc->teichmuller(a)), Wtgt->teichmuller(a)));
    // alpha(V(1)) = (pi/pi') V'(1)
    WittVec av1 = base_morphism(Wsrc, Wtgt, Wsrc->verschiebung(Wsrc->one()));
    RingElem ratio = R->div_exact(R->from_int(3), R->pi());
    WittVec rhs = Wtgt->mul(Wtgt->scalar(ratio), Wtgt->verschiebung(Wtgt->one()));
    CHECK(Wtgt->eq(av1, rhs));
    for (int it = 0; it < 6; ++it) {
        WittVec x = random_vec(Wsrc, rng), y = random_vec(Wsrc, rng);
        // ring homomorphism
        CHECK(Wtgt->eq(base_morphism(Wsrc, Wtgt, Wsrc->add(x, y)),
                       Wtgt->add(base_morphism(Wsrc, Wtgt, x), base_morphism(Wsrc, Wtgt, y))));
        CHECK(Wtgt->eq(base_morphism(Wsrc, Wtgt, Wsrc->mul(x, y)),
                       Wtgt->mul(base_morphism(Wsrc, Wtgt, x), base_morphism(Wsrc, Wtgt, y))));
        // ghost components are preserved
        auto gs = Wsrc->ghost(x);
        auto gt = Wtgt->ghost(base_morphism(Wsrc, Wtgt, x));
        for (int n = 0; n < Wsrc->m(); ++n) CHECK(R->equal(gs[n], gt[n]));
        // Frobenius equivariance
        CHECK(Wtgt->eq(base_morphism(Wsrc, Wtgt, Wsrc->frobenius(x)),
                       Wtgt->frobenius(base_morphism(Wsrc, Wtgt, x))));
    }
}

TEST_CASE("strictness of the induced frame morphism") {
    // L_{O'/O, kappa} -> L_{O'/O', alpha(kappa)} commutes with sigma-dot
    std::mt19937_64 rng(227);
    auto R = make_ring(FieldSpec{3, 1, {-3, 0, 1}, false}, 10);
    auto Wsrc = WittRing::make(R, R->from_int(3), 3, 4);
    auto Wtgt = WittRing::make(R, R->pi(), 3, 4);
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
    CHECK(t_is_unit(Ttgt, kappa_t));
    TensorElem theta_t = t_one(Ttgt);  // trivial extension on the target side
    for (int it = 0; it < 5; ++it) {
        // generators of the source ideal: V-images and xi0-multiples
        TensorElem xi = t_add(F.T, t_versch(F.T, t_random(F.T, rng, Wsrc->m() - 1)),
                              t_mul(F.T, F.xi0, t_random(F.T, rng)));
        TensorElem lhs = alpha_tensor(frame_sigma_dot(F, xi));
        TensorElem rhs = frame_sigma_dot_kappa(Ttgt, kappa_t, theta_t, alpha_tensor(xi));
        CHECK(t_eq(Ttgt, lhs, rhs, Wtgt->m() - 2));
    }
}
