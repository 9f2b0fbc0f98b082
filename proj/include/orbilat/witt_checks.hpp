#pragma once

// The frame/duality identity battery: ghost homomorphism laws, F V = pi,
// theta/kappa certificates for e in {1,2,3} over Z_3 and Z_5, the frame
// relation with the Remark-12.8 element, the canonical-unit ghost values,
// rank-one conversion round trips, window pairing and epsilon twists, and
// the ramified-tower base morphism.  Returns one report per identity.

#include <vector>

#include "orbilat/reductions.hpp"

namespace orbilat {

std::vector<CheckReport> witt_suite(unsigned long long seed);

}  // namespace orbilat
