#include "doctest.h"
#include "orbilat/hermitian.hpp"

#include <random>

using namespace orbilat;

namespace {

Mat diag_gram(const RingPtr& R, const std::vector<int>& pi_powers) {
    int n = static_cast<int>(pi_powers.size());
    Mat G = mat_zero(R, n, n);
    for (int i = 0; i < n; ++i) G.at(i, i) = R->pi_pow(pi_powers[i]);
    return G;
}

Mat random_invertible(const RingPtr& R, std::mt19937_64& rng, int n, int height = 3) {
    for (int t = 0; t < 200; ++t) {
        Mat A = mat_zero(R, n, n);
        for (auto& x : A.a) x = R->random_integral(rng, height);
        try {
            (void)mat_det(A);
            return A;
        } catch (const PrecisionError&) {
        }
    }
    throw std::runtime_error("no invertible draw");
}

}  // namespace

TEST_CASE("dual lattice basics") {
    auto R = make_ring(FieldSpec{3, 1, {}, true}, 10);
    auto S = make_space(R, mat_identity(R, 3));
    Lattice std3 = standard_lattice(R, 3);
    CHECK(lattice_equal(dual_lattice(std3, S), std3));

    Mat g1 = mat_zero(R, 1, 1);
    g1.at(0, 0) = R->from_int(3);
    auto S1 = make_space(R, g1);
    Lattice std1 = standard_lattice(R, 1);
    Lattice d = dual_lattice(std1, S1);
    CHECK(lattice_index(d, std1) == 1);
    CHECK(R->valuation(d.basis.at(0, 0)) == -1);

    std::mt19937_64 rng(61);
    auto S2 = make_space(R, diag_gram(R, {0, 1}));
    for (int it = 0; it < 12; ++it) {
        Lattice L = hnf(random_invertible(R, rng, 2));
        Lattice dd = dual_lattice(dual_lattice(L, S2), S2);
        CHECK(lattice_equal(dd, L));
    }
}

TEST_CASE("parity classification") {
    auto R = make_ring(FieldSpec{3, 1, {}, true}, 10);
    for (int n = 1; n <= 3; ++n) {
        auto S = make_space(R, mat_identity(R, n));
        CHECK(parity(S) == Parity::Even);
    }
    CHECK(parity(make_space(R, diag_gram(R, {0, 1}))) == Parity::Odd);
    CHECK(parity(make_space(R, diag_gram(R, {1, 1}))) == Parity::Even);

    // independence of the lattice: [hL^v : hL] has the same parity
    std::mt19937_64 rng(67);
    auto S = make_space(R, diag_gram(R, {0, 1, 2}));
    Lattice std3 = standard_lattice(R, 3);
    long long base = lattice_index(dual_lattice(std3, S), std3);
    for (int it = 0; it < 10; ++it) {
        Mat h = random_invertible(R, rng, 3);
        Lattice hL = hnf(mat_mul(h, std3.basis));
        long long idx = lattice_index(dual_lattice(hL, S), hL);
        CHECK((idx - base) % 2 == 0);
    }
}

TEST_CASE("adjoint involution") {
    std::mt19937_64 rng(71);
    auto R = make_ring(FieldSpec{3, 1, {}, true}, 10);
    auto S = make_space(R, diag_gram(R, {0, 1}));
    // scalars conjugate
    RingElem a = R->random_integral(rng, 3);
    Mat aI = mat_scalar_mul(a, mat_identity(R, 2));
    CHECK(mat_equal(adjoint(aI, S), mat_scalar_mul(sigma(a), mat_identity(R, 2))));
    for (int it = 0; it < 10; ++it) {
        Mat x = mat_zero(R, 2, 2);
        for (auto& e : x.a) e = R->random_integral(rng, 3);
        Mat y = mat_zero(R, 2, 2);
        for (auto& e : y.a) e = R->random_integral(rng, 3);
        Mat xs = adjoint(x, S);
        CHECK(mat_equal(adjoint(xs, S), x));
        CHECK(mat_equal(adjoint(mat_mul(x, y), S), mat_mul(adjoint(y, S), xs)));
        // defining property on basis vectors
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Vec ei(2, R->zero()), ej(2, R->zero());
                ei[i] = R->one();
                ej[j] = R->one();
                CHECK(form(S, mat_apply(x, ei), ej) == form(S, ei, mat_apply(xs, ej)));
            }
        // Lie-algebra elements return their negative
        Mat lie = mat_sub(x, adjoint(x, S));
        CHECK(mat_equal(adjoint(lie, S), mat_neg(lie)));
    }
}

TEST_CASE("classify_factors") {
    auto R = make_ring(FieldSpec{3, 1, {}, true}, 10);
    auto S = make_space(R, diag_gram(R, {0, 1}));
    Mat e0 = mat_zero(R, 2, 2), e1 = mat_zero(R, 2, 2);
    e0.at(0, 0) = R->one();
    e1.at(1, 1) = R->one();
    auto factors = classify_factors(S, {e0, e1});
    REQUIRE(factors.size() == 2);
    CHECK(factors[0].parity == Parity::Even);
    CHECK(factors[1].parity == Parity::Odd);

    auto whole = classify_factors(S, {mat_identity(R, 2)});
    REQUIRE(whole.size() == 1);
    CHECK(whole[0].parity == parity(S));

    // three factors: parities (Even, Odd, Odd); index sums agree
    auto S3 = make_space(R, diag_gram(R, {0, 1, 3}));
    Mat f0 = mat_zero(R, 3, 3), f1 = mat_zero(R, 3, 3), f2 = mat_zero(R, 3, 3);
    f0.at(0, 0) = R->one();
    f1.at(1, 1) = R->one();
    f2.at(2, 2) = R->one();
    auto fs = classify_factors(S3, {f0, f1, f2});
    CHECK(fs[0].parity == Parity::Even);
    CHECK(fs[1].parity == Parity::Odd);
    CHECK(fs[2].parity == Parity::Odd);
    long long sum = 0;
    for (auto& f : fs) sum += dual_index(f.space);
    CHECK(sum == dual_index(S3));
    CHECK(parity(S3) == Parity::Even);  // two odd factors, even total

    // error paths
    Mat notperp = mat_zero(R, 2, 2);
    notperp.at(0, 0) = R->one();
    notperp.at(0, 1) = R->one();
    CHECK_THROWS_AS(classify_factors(S, {notperp, e1}), SpecError);
}

TEST_CASE("trace lift and descent along an unramified cubic") {
    auto R = make_ring(FieldSpec{3, 1, {}, true}, 12);
    // t^3 - t - 1 is irreducible mod 3
    auto alg = make_ext_algebra(R, {-1, -1, 0, 1});
    CHECK(alg.res_degree == 3);
    CHECK(alg.ram_degree == 1);
    AElem theta = a_theta(alg);

    // descend the unit form on A (rank 1): Gram over E is the trace-form matrix
    std::vector<std::vector<AElem>> unitA{{a_one(alg)}};
    auto SE = descend_form(alg, unitA, theta);
    CHECK(SE.n == 3);
    AElem gen = a_gen(alg);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            AElem t = a_mul(alg, theta, a_mul(alg, a_pow(alg, gen, i), a_pow(alg, gen, j)));
            CHECK(SE.gram.at(i, j) == a_trace(alg, t));
        }

    // round-trip: lift the descended form back; J^A = sigma(v) w c recovered
    std::mt19937_64 rng(73);
    AElem c = a_add(alg, a_one(alg), a_from_ring(alg, R->pi() * R->random_integral(rng, 2)));
    c = a_mul(alg, c, a_sigma(alg, c));  // sigma-fixed unit
    std::vector<std::vector<AElem>> gramA{{c}};
    auto SE2 = descend_form(alg, gramA, theta);
    Mat action = mat_zero(R, 3, 3);
    {
        Mat comp = a_mult_matrix(alg, gen);
        action = comp;
    }
    auto lifted = lift_form(SE2, action, alg, theta);
    REQUIRE(lifted.n == 1);
    CHECK(a_equal(alg, lifted.gram[0][0], c));

    // dual of an O_A-lattice agrees under both forms
    Lattice stdE = standard_lattice(R, 3);
    Lattice dE = dual_lattice(stdE, SE2);
    // A-side dual of O_A is (c)^{-1} O_A, expanded over E by the mult matrix
    AElem cinv = a_inverse(alg, c);
    Mat dual_cols = a_mult_matrix(alg, cinv);
    Lattice dA = hnf(dual_cols);
    CHECK(lattice_equal(dE, dA));

    // error paths: non-self-adjoint action, degenerate theta
    Mat badaction = action;
    badaction.at(0, 1) = badaction.at(0, 1) + R->one();
    CHECK_THROWS_AS(lift_form(SE2, badaction, alg, theta), SpecError);
    AElem bad_theta = theta;
    for (auto& cc : bad_theta) cc = cc * R->pi();
    CHECK_THROWS_AS(lift_form(SE2, action, alg, bad_theta), SpecError);
}

TEST_CASE("degenerate lift: A = E is the identity") {
    auto R = make_ring(FieldSpec{3, 1, {}, true}, 10);
    auto alg = make_ext_algebra(R, {-1, 1});  // t - 1: A = E
    CHECK(alg.d == 1);
    AElem theta = a_theta(alg);
    CHECK(a_equal(alg, theta, a_one(alg)));
    std::vector<std::vector<AElem>> gramA{{a_one(alg)}};
    auto SE = descend_form(alg, gramA, theta);
    CHECK(SE.n == 1);
    CHECK(SE.gram.at(0, 0) == R->one());
}

TEST_CASE("duality within a quotient is an inclusion-reversing involution") {
    auto R = make_ring(FieldSpec{3, 1, {}, true}, 12);
    auto S = make_space(R, diag_gram(R, {1, 1}));
    Lattice top = standard_lattice(R, 2);
    Lattice bottom = hnf(mat_mul(S.gram, top.basis));  // = pi * O^2, inside its dual
    Lattice dual_bottom = dual_lattice(bottom, S);
    CHECK(lattice_subset(bottom, dual_bottom));
    FiniteQuotient fq = quotient(bottom, dual_bottom);
    auto all = enumerate_intermediate(fq, EnumMode::EchelonAll);
    long long l = fq.length();
    for (const auto& L : all) {
        Lattice Ld = dual_lattice(L, S);
        CHECK(lattice_subset(bottom, Ld));
        CHECK(lattice_subset(Ld, dual_bottom));
        CHECK(lattice_index(Ld, bottom) == l - lattice_index(L, bottom));
        CHECK(lattice_equal(dual_lattice(Ld, S), L));
    }
}
