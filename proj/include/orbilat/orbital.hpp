#pragma once

// Regular-semisimple adjoint-stable pairs (x, j), the semilinear involution
// tau, the counting sets M(x,j)_i and I(x,j), the orbital series O(x,j;s) as
// an exact Laurent polynomial in u = q^{-s}, transfer factors, and matching
// invariants.

#include <map>

#include "orbilat/hermitian.hpp"
#include "orbilat/lattice.hpp"

namespace orbilat {

struct LaurentSeries {
    std::map<long long, long long> coeff;  // exponent of u -> integer coefficient

    bool operator==(const LaurentSeries& o) const { return coeff == o.coeff; }
};

LaurentSeries series_mul(const LaurentSeries& a, const LaurentSeries& b);
LaurentSeries series_shift(const LaurentSeries& a, long long k);  // * u^k
long long series_value_at_one(const LaurentSeries& a);
// -d/d(s log q) at s = 0 for sum c_i u^i, u = q^{-s}: equals sum i * c_i... with
// the Def-9.3 sign this is minus that; see derived_orbital
long long series_log_derivative(const LaurentSeries& a);

struct RSPair {
    HermitianSpace space;
    Mat x;
    Vec j;
    Mat cyclic;        // [j | x j | ... | x^{n-1} j]
    Mat xstar;
    Mat tau;           // tau(v) = tau * sigma(v)
    Lattice span;      // L(x, j)
    Lattice dual;      // L(x, j)^vee
    bool span_in_dual = false;
};

// validates Def-9.1-style regularity and adjoint stability, builds tau
RSPair make_pair(const HermitianSpace& S, const Mat& x, const Vec& j);

// O_E[x] j, saturated under x (errors if the saturation does not stabilize)
Lattice span_lattice(const HermitianSpace& S, const Mat& x, const Vec& j);

struct CountingSet {
    std::vector<Lattice> lattices;   // M(x, j)
    std::vector<long long> lengths;  // len(Lambda / L), aligned with lattices
    std::map<long long, long long> by_length() const;
};

// all of M(x,j) (empty when L is not contained in its dual)
CountingSet counting_sets(const RSPair& pair, EnumMode strategy = EnumMode::StableClosure,
                          std::size_t cap = 100000);

LaurentSeries orbital_series(const CountingSet& M);
LaurentSeries orbital_series(const RSPair& pair);
long long orbital_value(const RSPair& pair);    // O(x, j)
long long derived_orbital(const RSPair& pair);  // -sum (-1)^i i |M_i|
long long derived_orbital(const CountingSet& M);
long long orbital_value(const CountingSet& M);

// I(x, j): x-stable self-dual lattices between L and its dual
long long unitary_count(const RSPair& pair, std::size_t cap = 100000);
std::vector<Lattice> unitary_lattices(const RSPair& pair, std::size_t cap = 100000);

// l = [span{gamma^i u} : Lambda_ref] with the sign fixed by the examples:
// span = Lambda_ref gives 0, span = pi Lambda_ref gives +1.  Omega = (-1)^l.
std::pair<long long, int> transfer_factor(const Mat& gamma, const Vec& u, const Lattice& ref);

LaurentSeries series_with_transfer(const LaurentSeries& s, long long l);

struct MatchInvariants {
    std::vector<RingElem> charpoly;  // monic, degree n
    std::vector<RingElem> moments;   // udual gamma^i u, i = 0 .. 2n-1
};

// Lemma-6.2-style regularity: both {gamma^i u} and {udual gamma^i} generate
bool regular_semisimple_element(const Mat& gamma, const Vec& u, const Vec& udual);
MatchInvariants match_invariants(const Mat& gamma, const Vec& u, const Vec& udual);
bool is_match(const MatchInvariants& a, const MatchInvariants& b);

}  // namespace orbilat
