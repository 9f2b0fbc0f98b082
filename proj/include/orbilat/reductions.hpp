#pragma once

// Reduction identities as executable checks: extension constructions,
// idempotent splitting, base change to an auxiliary extension, product and
// scaling identities, plus the seeded instance generator that feeds them.
//
// Every top-level check runs at the policy precision N = 2*maxdiv + 8 and
// again at N + 4; a pass requires exact agreement of all integer and series
// outputs between the two runs.

#include <optional>
#include <random>
#include <string>

#include "orbilat/orbital.hpp"

namespace orbilat {

enum class Structure { Generic, Split, Subfield };
enum class ElementKind { Lie, Group };

struct InstanceProfile {
    long long p = 3;
    int f0 = 1;
    int n = 2;
    Parity parity = Parity::Even;
    Structure structure = Structure::Generic;
    int split_parts = 2;
    std::vector<long long> subfield_minpoly;  // monic integer minimal polynomial
    int subfield_rank = 1;                    // rank over the extension
    ElementKind kind = ElementKind::Lie;
    unsigned long long seed = 1;
    int precision = 0;   // 0 = policy default
    std::size_t cap = 100000;
};

struct BaseChangeData {
    std::vector<long long> minpoly;
    Mat action;                             // generator of O_A acting on the base space
    std::vector<std::vector<AElem>> gramA;  // the instance as seen over A
    std::vector<std::vector<AElem>> xA;
    std::vector<AElem> jA;
};

struct GeneratedInstance {
    InstanceProfile profile;
    RingPtr ring;
    HermitianSpace space;
    Mat x;
    Vec j;
    RSPair pair;
    ElementKind kind = ElementKind::Lie;
    std::optional<BaseChangeData> base_change;
    int rejections = 0;
};

// deterministic in (profile, N); regeneration at a higher precision
// reproduces the same instance
GeneratedInstance gen_instance_at(const InstanceProfile& profile, int N);
GeneratedInstance gen_instance(const InstanceProfile& profile);

struct CheckReport {
    std::string identity;
    std::string inputs_digest;
    std::string lhs, rhs;
    bool pass = false;
    std::vector<int> precisions;
    long long millis = 0;
    std::string note;
};

// ---- extension constructions ----------------------------------------------

struct Extended {
    HermitianSpace space;  // V + E u~ with the extended form
    Mat elem;              // block element
    Vec uvec;              // the new distinguished vector
    RingElem scalar;       // group mode: the chosen norm-one scalar
};

// Lie mode: x in u(J) -> block element on (V + E u', J + <1>) with zero corner
Extended extend_lie(const HermitianSpace& S, const Mat& x, const Vec& j);
// group mode: g in U(J), v(J(j,j)) >= 1, q + 1 > n; g' = diag(g, a) with a
// norm-one and charpoly(g)(a) a unit.  force_a overrides the choice (used by
// the negative control).
Extended extend_group(const HermitianSpace& S, const Mat& g, const Vec& j,
                      const RingElem* force_a = nullptr);

// ---- idempotent splitting ---------------------------------------------------

struct SplitFactor {
    Mat idempotent;       // self-adjoint idempotent on the ambient space
    HermitianSpace space;
    Mat basis;            // ambient columns spanning the factor
    Mat x;
    Vec j;
    Parity parity;
};
// Hensel-lifts the idempotents of a *-stable residue factorization of the
// characteristic polynomial; throws SpecError when no splitting exists
std::vector<SplitFactor> split_idempotents(const RSPair& pair);

// ---- base change -------------------------------------------------------------

struct BaseChangeOutcome {
    std::map<long long, long long> base_counts, a_counts;
    int f = 1;
    bool lengths_divisible = true;
    long long value_base = 0, value_A = 0;
    long long derived_base = 0, derived_A = 0;
    bool a_side_enumerated = false;  // the concrete A-ring cross enumeration ran
    std::map<long long, long long> a_counts_direct;
};
BaseChangeOutcome base_change_compare(const RSPair& pair, const BaseChangeData& bc,
                                      std::size_t cap = 100000);

// ---- top-level checks (instance generation + doubled-precision validation) --

CheckReport vanishing_check(const InstanceProfile&);
CheckReport fl_check(const InstanceProfile&);
CheckReport product_check(const InstanceProfile&);
CheckReport base_change_check(const InstanceProfile&);
CheckReport extension_check(const InstanceProfile&);        // group mode
CheckReport block_reduction_check(const InstanceProfile&);  // Lie mode
CheckReport run_check(const std::string& name, const InstanceProfile&);

// sampling helpers (shared with tests and the CLI)
Mat random_unitary_lie(const HermitianSpace& S, const std::vector<int>& kexp, std::mt19937_64& rng);
Mat cayley_isometry(const HermitianSpace& S, std::mt19937_64& rng);

std::string profile_digest(const InstanceProfile&);

}  // namespace orbilat
