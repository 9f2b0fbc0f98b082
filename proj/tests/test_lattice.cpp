#include "doctest.h"
#include "orbilat/lattice.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace orbilat;

namespace {

Mat random_mat(const RingPtr& R, std::mt19937_64& rng, int n, int height = 3) {
    Mat A = mat_zero(R, n, n);
    for (auto& x : A.a) x = R->random_integral(rng, height);
    return A;
}

Mat random_invertible(const RingPtr& R, std::mt19937_64& rng, int n, int height = 3) {
    for (int t = 0; t < 200; ++t) {
        Mat A = random_mat(R, rng, n, height);
        try {
            (void)mat_det(A);
            return A;
        } catch (const PrecisionError&) {
        }
    }
    throw std::runtime_error("no invertible draw");
}

// random element of GL_n(O_E): elementary column operations on the identity
Mat random_unimodular(const RingPtr& R, std::mt19937_64& rng, int n) {
    Mat U = mat_identity(R, n);
    for (int t = 0; t < 3 * n; ++t) {
        int i = static_cast<int>(rng() % n), j = static_cast<int>(rng() % n);
        if (i == j) continue;
        RingElem c = R->random_integral(rng, 2);
        for (int r = 0; r < n; ++r) U.at(r, j) = U.at(r, j) + c * U.at(r, i);
    }
    // a couple of swaps
    for (int t = 0; t < n; ++t) {
        int i = static_cast<int>(rng() % n), j = static_cast<int>(rng() % n);
        if (i == j) continue;
        for (int r = 0; r < n; ++r) std::swap(U.at(r, i), U.at(r, j));
    }
    return U;
}

// Delsarte/Butler count of submodules of type mu inside type lambda over a
// chain ring with residue cardinality Q (partitions descending)
long long gauss_binom(int n, int k, long long Q) {
    if (k < 0 || k > n) return 0;
    // prod_{i=0}^{k-1} (Q^{n-i} - 1) / (Q^{k-i} - 1), computed exactly
    long long num = 1;
    std::vector<long long> nums, dens;
    for (int i = 0; i < k; ++i) {
        long long qn = 1, qk = 1;
        for (int t = 0; t < n - i; ++t) qn *= Q;
        for (int t = 0; t < k - i; ++t) qk *= Q;
        nums.push_back(qn - 1);
        dens.push_back(qk - 1);
    }
    // cancel exactly
    long long acc = 1;
    for (std::size_t i = 0; i < nums.size(); ++i) acc *= nums[i];
    for (std::size_t i = 0; i < dens.size(); ++i) {
        if (acc % dens[i]) throw std::runtime_error("gauss binom not integral");
        acc /= dens[i];
    }
    (void)num;
    return acc;
}

std::vector<int> conjugate_partition(std::vector<int> l) {
    std::sort(l.rbegin(), l.rend());
    std::vector<int> c;
    for (int i = 1; !l.empty() && i <= l[0]; ++i) {
        int cnt = 0;
        for (int x : l)
            if (x >= i) ++cnt;
        c.push_back(cnt);
    }
    return c;
}

long long count_subgroups_of_type(const std::vector<int>& lambda, const std::vector<int>& mu,
                                  long long Q) {
    auto lc = conjugate_partition(lambda), mc = conjugate_partition(mu);
    int rows = static_cast<int>(lc.size());
    long long total = 1;
    for (int i = 1; i <= rows; ++i) {
        int li = lc[i - 1];
        int mi = (i - 1 < static_cast<int>(mc.size())) ? mc[i - 1] : 0;
        int mi1 = (i < static_cast<int>(mc.size())) ? mc[i] : 0;
        long long qpow = 1;
        for (int t = 0; t < mi1 * (li - mi); ++t) qpow *= Q;
        total *= qpow * gauss_binom(li - mi1, mi - mi1, Q);
    }
    return total;
}

long long count_all_submodules(const std::vector<int>& lambda, long long Q) {
    // sum over partitions mu contained in lambda (at most 2 parts here)
    int a = lambda[0], b = lambda.size() > 1 ? lambda[1] : 0;
    if (a < b) std::swap(a, b);
    long long total = 0;
    for (int m1 = 0; m1 <= a; ++m1)
        for (int m2 = 0; m2 <= std::min(m1, b); ++m2) {
            std::vector<int> mu;
            if (m1) mu.push_back(m1);
            if (m2) mu.push_back(m2);
            total += count_subgroups_of_type({a, b}, mu, Q);
        }
    return total;
}

}  // namespace

TEST_CASE("hnf canonical form") {
    std::mt19937_64 rng(43);
    auto R = make_ring(FieldSpec{3, 1, {}, true}, 10);
    // identity fixed
    Lattice I = hnf(mat_identity(R, 3));
    CHECK(mat_equal(I.basis, mat_identity(R, 3)));
    for (int it = 0; it < 15; ++it) {
        Mat B = random_invertible(R, rng, 3);
        Lattice L = hnf(B);
        // permuted columns span the same lattice
        Mat P = B;
        for (int r = 0; r < 3; ++r) std::swap(P.at(r, 0), P.at(r, 2));
        CHECK(lattice_equal(hnf(P), L));
        // unimodular right multiplication preserves the canonical form
        Mat U = random_unimodular(R, rng, 3);
        CHECK(lattice_equal(hnf(mat_mul(B, U)), L));
        // idempotent
        CHECK(lattice_equal(hnf(L.basis), L));
    }
}

TEST_CASE("index examples and chain additivity") {
    std::mt19937_64 rng(47);
    auto R = make_ring(FieldSpec{3, 1, {}, true}, 12);
    Lattice std3 = standard_lattice(R, 3);
    CHECK(lattice_index(std3, std3) == 0);
    Lattice shrunk = scale_lattice(R->pi_pow(-1), std3);
    CHECK(lattice_index(shrunk, std3) == 3);
    // index(L, hL) = v(det h)
    for (int it = 0; it < 10; ++it) {
        Mat h = random_invertible(R, rng, 3);
        Lattice hL = hnf(mat_mul(h, std3.basis));
        CHECK(lattice_index(std3, hL) == R->valuation(mat_det(h)));
    }
    for (int it = 0; it < 10; ++it) {
        Lattice L1 = hnf(random_invertible(R, rng, 3));
        Lattice L2 = hnf(random_invertible(R, rng, 3));
        Lattice L3 = hnf(random_invertible(R, rng, 3));
        CHECK(lattice_index(L1, L2) + lattice_index(L2, L3) == lattice_index(L1, L3));
    }
}

TEST_CASE("quotient divisors and membership") {
    auto R = make_ring(FieldSpec{3, 1, {}, true}, 12);
    Lattice top = standard_lattice(R, 2);
    Lattice bottom = scale_lattice(R->from_int(3), top);
    FiniteQuotient Q = quotient(bottom, top);
    std::multiset<int> ds(Q.divisors.begin(), Q.divisors.end());
    CHECK(ds == std::multiset<int>({1, 1}));
    CHECK(Q.length() == lattice_index(top, bottom));
    // reduce is a section: reduce(v) == v mod bottom
    std::mt19937_64 rng(53);
    for (int it = 0; it < 10; ++it) {
        Vec v{R->random_integral(rng, 2), R->random_integral(rng, 2)};
        Vec r = Q.reduce(v);
        Vec diff = vec_sub(v, r);
        CHECK(lattice_contains(bottom, diff));
        CHECK(vec_equal(Q.reduce(r), r));
    }
}

TEST_CASE("enumeration: projective line count over the residue field") {
    for (auto spec : {FieldSpec{3, 1, {}, true}, FieldSpec{5, 1, {}, true}}) {
        auto R = make_ring(spec, 10);
        long long Q = R->residue_size();  // q^2
        Lattice top = standard_lattice(R, 2);
        Lattice bottom = scale_lattice(R->pi(), top);
        FiniteQuotient fq = quotient(bottom, top);
        auto bfs = enumerate_intermediate(fq, EnumMode::BfsAll);
        auto ech = enumerate_intermediate(fq, EnumMode::EchelonAll);
        CHECK(static_cast<long long>(bfs.size()) == Q + 3);
        CHECK(static_cast<long long>(ech.size()) == Q + 3);
    }
}

TEST_CASE("bfs and echelon agree; counts match the chain-ring formula") {
    std::mt19937_64 rng(59);
    for (auto spec : {FieldSpec{3, 1, {}, true}, FieldSpec{5, 1, {}, true}}) {
        auto R = make_ring(spec, 14);
        long long Q = R->residue_size();
        for (int a = 0; a <= 3; ++a)
            for (int b = 0; b <= a; ++b) {
                if (a + b == 0) continue;
                Lattice top = standard_lattice(R, 2);
                Mat sub = mat_zero(R, 2, 2);
                sub.at(0, 0) = R->pi_pow(a);
                sub.at(1, 1) = R->pi_pow(b);
                Lattice bottom = hnf(sub);
                FiniteQuotient fq = quotient(bottom, top);
                auto ech = enumerate_intermediate(fq, EnumMode::EchelonAll);
                long long expect = count_all_submodules({a, b}, Q);
                CHECK(static_cast<long long>(ech.size()) == expect);
                if (fq.size() <= 1000.0) {
                    auto bfs = enumerate_intermediate(fq, EnumMode::BfsAll);
                    std::set<std::string> k1, k2;
                    for (auto& L : bfs) k1.insert(lattice_key(L));
                    for (auto& L : ech) k2.insert(lattice_key(L));
                    CHECK(k1 == k2);
                }
            }
        // a rank-3 shape as well
        Lattice top = standard_lattice(R, 3);
        Mat sub = mat_zero(R, 3, 3);
        sub.at(0, 0) = R->pi();
        sub.at(1, 1) = R->pi();
        sub.at(2, 2) = R->one();
        Lattice bottom = hnf(sub);
        FiniteQuotient fq = quotient(bottom, top);
        auto ech = enumerate_intermediate(fq, EnumMode::EchelonAll);
        auto bfs = enumerate_intermediate(fq, EnumMode::BfsAll);
        CHECK(ech.size() == bfs.size());
        CHECK(static_cast<long long>(ech.size()) == Q + 3);
    }
}

TEST_CASE("stable-only enumeration equals post-filtering") {
    auto R = make_ring(FieldSpec{3, 1, {}, true}, 12);
    // operator with distinct eigenlines on (O/pi)^2: only coordinate
    // submodules survive among the nontrivial ones
    Mat x = mat_zero(R, 2, 2);
    x.at(0, 0) = R->one();
    x.at(1, 1) = R->from_int(2);
    Lattice top = standard_lattice(R, 2);
    Lattice bottom = scale_lattice(R->pi(), top);
    FiniteQuotient fq = quotient(bottom, top);
    StabilizerOps stab;
    stab.linear.push_back(x);
    auto closure = enumerate_intermediate(fq, EnumMode::StableClosure, &stab);
    auto filtered = enumerate_intermediate(fq, EnumMode::BfsAll, &stab);
    std::set<std::string> k1, k2;
    for (auto& L : closure) k1.insert(lattice_key(L));
    for (auto& L : filtered) k2.insert(lattice_key(L));
    CHECK(k1 == k2);
    CHECK(closure.size() == 4);  // bottom, top, two coordinate lattices
}

TEST_CASE("is_stable basics") {
    auto R = make_ring(FieldSpec{3, 1, {}, true}, 10);
    Lattice std2 = standard_lattice(R, 2);
    CHECK(is_stable_linear(std2, mat_identity(R, 2), true));
    Mat bad = mat_scalar_mul(R->pi_pow(-1), mat_identity(R, 2));
    CHECK(!is_stable_linear(std2, bad, false));
    Mat shrink = mat_scalar_mul(R->pi(), mat_identity(R, 2));
    CHECK(is_stable_linear(std2, shrink, false));
    CHECK(!is_stable_linear(std2, shrink, true));
}
