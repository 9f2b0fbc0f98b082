#pragma once

// Canonical forms, indices, quotients, and exhaustive enumeration of
// intermediate O_E-submodules.
//
// A lattice is stored by a canonical column Hermite basis: upper triangular,
// diagonal pi^{k_i} (k_i may be negative), entries above the diagonal reduced
// to canonical representatives modulo the diagonal of their row.  Equal
// lattices have identical canonical matrices at working precision.

#include <cstddef>
#include <string>
#include <vector>

#include "orbilat/matrix.hpp"

namespace orbilat {

struct Lattice {
    RingPtr ring;
    int n = 0;
    Mat basis;            // canonical column Hermite form
    bool canonical = false;
};

// canonical column Hermite form of the span of the columns (cols >= rows,
// full row rank required; throws PrecisionError otherwise)
Lattice hnf(const Mat& columns);
Lattice standard_lattice(const RingPtr& R, int n);
Lattice scale_lattice(const RingElem& c, const Lattice& L);

// len(L1 / L1&L2) - len(L2 / L1&L2); equals v(det B2) - v(det B1).
// In particular index(pi^{-1} L, L) = n and index(L, hL) = v(det h).
long long lattice_index(const Lattice& L1, const Lattice& L2);

bool lattice_contains(const Lattice& L, const Vec& v);
bool lattice_subset(const Lattice& L1, const Lattice& L2);
bool lattice_equal(const Lattice& L1, const Lattice& L2);
std::string lattice_key(const Lattice& L);
Lattice lattice_sum(const Lattice& L1, const Lattice& L2);
Lattice lattice_add_vector(const Lattice& L, const Vec& v);

// all canonical representatives modulo pi^s (q_res^s of them)
std::vector<RingElem> canonical_residues(const RingPtr& R, int s);

// L <= Lv with the Smith data of the inclusion
struct FiniteQuotient {
    RingPtr ring;
    Lattice sub, sup;
    std::vector<int> divisors;  // one per basis column of `adapted`, ascending, possibly 0
    Mat adapted;                // sup = span(adapted), sub = span(adapted * diag(pi^d))
    long long length() const;   // sum of divisors (O_E-length of sup/sub)
    // |Q| as a double (may be huge); exact when small
    double size() const;
    std::vector<Vec> residue_reps(std::size_t cap) const;
    Vec lift(const std::vector<RingElem>& coords) const;
    Vec reduce(const Vec& v) const;  // canonical coset representative mod sub
};

FiniteQuotient quotient(const Lattice& sub, const Lattice& sup);

struct StabilizerOps {
    std::vector<Mat> linear;      // v -> A v
    std::vector<Mat> semilinear;  // v -> T sigma(v)
    bool empty() const { return linear.empty() && semilinear.empty(); }
};

enum class EnumMode {
    BfsAll,        // closure-by-generation oracle
    EchelonAll,    // direct canonical-form enumeration (fast path)
    StableClosure  // only sublattices stable under the supplied operators
};

// Every lattice M with sub <= M <= sup (optionally stable under all supplied
// operators, which must themselves stabilize sub and sup).  cap_elems bounds
// |Q| for the strategies that walk cosets; cap_out bounds the result size.
std::vector<Lattice> enumerate_intermediate(const FiniteQuotient& Q, EnumMode mode,
                                            const StabilizerOps* stab = nullptr,
                                            std::size_t cap_elems = 100000,
                                            std::size_t cap_out = 1000000);

// is_stable: A L <= L (linear) / T sigma(L) <= L (semilinear); with
// require_equal also demands equality of spans.
bool is_stable_linear(const Lattice& L, const Mat& A, bool require_equal);
bool is_stable_semilinear(const Lattice& L, const Mat& T, bool require_equal);

}  // namespace orbilat
