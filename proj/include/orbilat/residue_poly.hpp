#pragma once

// Polynomials over the residue field of a local ring, represented by
// integral ring elements reduced mod pi after every operation.  Little
// endians throughout.  Used for residue factorizations (Hensel seeds,
// inertia degrees, idempotent splittings).

#include <vector>

#include "orbilat/matrix.hpp"

namespace orbilat {
namespace respoly {

using RPoly = std::vector<RingElem>;

RPoly reduce(const RingPtr& R, RPoly f);           // mod pi + trim
int degree(const RPoly& f);
bool is_zero(const RPoly& f);
RPoly add(const RingPtr& R, const RPoly& f, const RPoly& g);
RPoly sub(const RingPtr& R, const RPoly& f, const RPoly& g);
RPoly mul(const RingPtr& R, const RPoly& f, const RPoly& g);
RPoly monic(const RingPtr& R, const RPoly& f);
// f = q*g + r
void divmod(const RingPtr& R, const RPoly& f, const RPoly& g, RPoly& q, RPoly& r);
RPoly gcd(const RingPtr& R, RPoly f, RPoly g);     // monic gcd
RPoly powmod(const RingPtr& R, RPoly base, long long e, const RPoly& mod);
RPoly derivative(const RingPtr& R, const RPoly& f);
RingElem eval(const RingPtr& R, const RPoly& f, const RingElem& x);

// all monic irreducible factors with multiplicity, degree(f) <= 4
std::vector<std::pair<RPoly, int>> factor(const RingPtr& R, const RPoly& f);

// extended gcd: returns (g, u, v) with u f + v g0 = g
void ext_gcd(const RingPtr& R, RPoly f, RPoly g0, RPoly& g, RPoly& u, RPoly& v);

}  // namespace respoly
}  // namespace orbilat
