#pragma once

// Hermitian E/E0-spaces: Gram matrices, adjoints, dual lattices, parity,
// trace lifting/descent of forms along an auxiliary extension, and
// etale-factor classification.
//
// Sesquilinearity convention: conjugate-linear in the FIRST argument,
//   J(v, w) = sigma(v)^T * gram * w,  so J(a v, w) = sigma(a) J(v, w).

#include <string>
#include <utility>
#include <vector>

#include "orbilat/ext_algebra.hpp"
#include "orbilat/lattice.hpp"
#include "orbilat/matrix.hpp"

namespace orbilat {

enum class Parity { Even, Odd };

struct HermitianSpace {
    RingPtr ring;
    int n = 0;
    Mat gram;
    std::string label;
};

// validates gram = sigma(gram)^T and nondegeneracy
HermitianSpace make_space(const RingPtr& R, const Mat& gram, std::string label = "");

RingElem form(const HermitianSpace& S, const Vec& v, const Vec& w);

// dual = {v : J(v, L) integral}; (L^dual)^dual = L
Lattice dual_lattice(const Lattice& L, const HermitianSpace& S);

// [dual : L] mod 2 for the standard lattice; independent of the lattice
Parity parity(const HermitianSpace& S);
long long dual_index(const HermitianSpace& S);  // [dual : standard], i.e. v(det gram)

// x* with J(x v, w) = J(v, x* w)
Mat adjoint(const Mat& x, const HermitianSpace& S);

// orthogonal factors cut out by self-adjoint idempotents; the subspace
// bases are returned so callers can restrict further data
struct FactorSpace {
    HermitianSpace space;
    Parity parity;
    Mat subspace_basis;  // n x n_i columns in the ambient space
};
std::vector<FactorSpace> classify_factors(const HermitianSpace& S, const std::vector<Mat>& idempotents);

// ---- trace lifting / descent along A = E[t]/(m) ---------------------------

// Space over E with an A-action (matrix of the generator) -> A/A0-hermitian
// space; theta must generate the inverse different (trace pairing perfect on
// the integral level).  Returns the A-space together with the A-basis of V
// used (columns: ambient coordinates of b_1, ..., b_{n'}).
struct LiftedSpace {
    ExtAlgebra alg;
    int n = 0;                      // rank over A
    std::vector<std::vector<AElem>> gram;  // n x n over A
    Mat basis;                      // E-ambient columns of the chosen A-basis
};
LiftedSpace lift_form(const HermitianSpace& S, const Mat& action, const ExtAlgebra& alg,
                      const AElem& theta);

// inverse direction: gram over A (for the power basis alpha^k b_i) -> E-space
HermitianSpace descend_form(const ExtAlgebra& alg, const std::vector<std::vector<AElem>>& gramA,
                            const AElem& theta);

}  // namespace orbilat
