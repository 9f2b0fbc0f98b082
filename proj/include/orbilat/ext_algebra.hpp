#pragma once

// A = E[t]/(m) for a monic integral minimal polynomial m with rational
// integer coefficients (the generator comes from the degree-d subfield A0).
// The Galois conjugation of A/A0 acts coefficientwise through sigma on E and
// fixes the generator.

#include <vector>

#include "orbilat/matrix.hpp"

namespace orbilat {

using AElem = std::vector<RingElem>;  // length d, little-endian in the generator

struct ExtAlgebra {
    RingPtr ring;  // E
    int d = 0;
    std::vector<long long> minpoly_int;  // length d+1, monic, integer coefficients
    std::vector<RingElem> minpoly;       // same, over E
    int res_degree = 0;                  // f = residue degree of A over E
    int ram_degree = 0;                  // e = d / f
};

ExtAlgebra make_ext_algebra(const RingPtr& R, const std::vector<long long>& minpoly);

AElem a_zero(const ExtAlgebra& A);
AElem a_one(const ExtAlgebra& A);
AElem a_gen(const ExtAlgebra& A);                  // the class of t
AElem a_from_ring(const ExtAlgebra& A, const RingElem& c);
AElem a_add(const ExtAlgebra& A, const AElem& x, const AElem& y);
AElem a_sub(const ExtAlgebra& A, const AElem& x, const AElem& y);
AElem a_neg(const ExtAlgebra& A, const AElem& x);
AElem a_mul(const ExtAlgebra& A, const AElem& x, const AElem& y);
AElem a_pow(const ExtAlgebra& A, AElem x, long long k);
AElem a_sigma(const ExtAlgebra& A, const AElem& x);   // id on the generator, sigma on coefficients
bool a_equal(const ExtAlgebra& A, const AElem& x, const AElem& y);
bool a_is_zero(const ExtAlgebra& A, const AElem& x);
Mat a_mult_matrix(const ExtAlgebra& A, const AElem& x);  // d x d over E
RingElem a_trace(const ExtAlgebra& A, const AElem& x);
AElem a_inverse(const ExtAlgebra& A, const AElem& x);
// 1/m'(alpha): a generator of the inverse different of A0 (monogenic order)
AElem a_theta(const ExtAlgebra& A);
// valuation with respect to the A-uniformizer: v_A = v_E * e / (value on pi_E)...
// implemented as: min over Newton-polygon-free route, see .cpp
int a_valuation(const ExtAlgebra& A, const AElem& x);

}  // namespace orbilat
