#pragma once

// Truncated relative Witt vectors W_O(R) for a local base O with uniformizer
// pi and residue cardinality q, coefficients in a truncated local ring R that
// is an O-algebra.  Ghost components are w_n = sum_{i<=n} pi^i x_i^{q^{n-i}}.
//
// Ring operations evaluate the structure polynomials pointwise: operands are
// lifted to a boosted-precision copy of R, combined on ghost coordinates, and
// solved back; every division by pi in the solve is asserted exact.  The
// symbolic structure polynomials are available separately (small m) and are
// cross-checked against the pointwise path.

#include <map>
#include <memory>
#include <vector>

#include "orbilat/matrix.hpp"

namespace orbilat {

class WittRing;
using WittRingPtr = std::shared_ptr<const WittRing>;

struct WittVec {
    WittRingPtr W;
    std::vector<RingElem> c;  // length = current truncation, may shrink under F
    int len() const { return static_cast<int>(c.size()); }
};

class WittRing : public std::enable_shared_from_this<WittRing> {
  public:
    // R: coefficient ring; pi_in_R: image of the base uniformizer; qO: residue
    // cardinality of the base; m: truncation length
    static WittRingPtr make(const RingPtr& R, const RingElem& pi_in_R, long long qO, int m);

    const RingPtr& coeff_ring() const { return R_; }
    const RingPtr& boosted_ring() const { return Rb_; }
    const RingElem& pi() const { return pi_; }
    long long q() const { return q_; }
    int m() const { return m_; }

    WittVec zero(int len = -1) const;
    WittVec one(int len = -1) const;
    WittVec teichmuller(const RingElem& a, int len = -1) const;
    WittVec from_coords(const std::vector<RingElem>& c) const;
    // the structural image of an element of O (given via its image in R);
    // all ghost components equal a
    WittVec scalar(const RingElem& a_in_R, int len = -1) const;
    WittVec from_int(long long a, int len = -1) const;

    WittVec add(const WittVec& x, const WittVec& y) const;
    WittVec sub(const WittVec& x, const WittVec& y) const;
    WittVec neg(const WittVec& x) const;
    WittVec mul(const WittVec& x, const WittVec& y) const;
    WittVec frobenius(const WittVec& x) const;      // length drops by one
    WittVec verschiebung(const WittVec& x) const;   // (0, x_0, ...), capped at m
    WittVec versch_inverse(const WittVec& x) const; // first coordinate must vanish
    bool in_verschiebung_image(const WittVec& x) const;

    bool eq(const WittVec& x, const WittVec& y, int upto = -1) const;
    bool is_zero(const WittVec& x, int upto = -1) const;

    // ghost components w_0 .. w_{len-1} (computed in the boosted ring, then
    // truncated back)
    std::vector<RingElem> ghost(const WittVec& x) const;
    WittVec from_ghost(const std::vector<RingElem>& g) const;

  private:
    WittRing() = default;
    RingElem promote(const RingElem& x) const;
    RingElem demote(const RingElem& x) const;
    std::vector<RingElem> ghost_boosted(const WittVec& x) const;
    WittVec solve_from_ghost_boosted(const std::vector<RingElem>& g) const;

    RingPtr R_, Rb_;
    RingElem pi_, pi_b_;
    long long q_ = 0;
    int m_ = 0;
};

// ---- symbolic structure polynomials ----------------------------------------

// multivariate polynomial with __int128 coefficients in variables
// x_0..x_{m-1}, y_0..y_{m-1} (exponent vectors of length 2m)
struct StructPoly {
    int nvars = 0;
    std::map<std::vector<std::uint16_t>, __int128> terms;
};

struct StructurePolys {
    long long p = 0, q = 0;
    int m = 0;
    std::vector<StructPoly> sum;      // s_0 .. s_{m-1}
    std::vector<StructPoly> product;  // p_0 .. p_{m-1}
};

// base O = Z_p wants q = p; a base with residue q uses pi-divisions with the
// same integrality statement.  Throws SpecError when the expansion exceeds
// the configured term budget (large q with m = 4).
StructurePolys structure_polys(long long p, long long q, int m, std::size_t term_cap = 2000000);
RingElem struct_poly_eval(const StructPoly& sp, const std::vector<RingElem>& xy);

// ---- O' (x) W_O(R): the ambient ring of Lubin-Tate frames --------------------

struct TensorRing {
    WittRingPtr W;
    std::vector<long long> eis;  // Eisenstein polynomial of O'/O (integer coefficients); empty = trivial
    int e = 1;
    RingElem pi_prime;           // image of pi' in R
};

struct TensorElem {
    std::vector<WittVec> comp;  // coefficients of 1, pi', ..., pi'^{e-1}
};

TensorRing make_tensor_ring(const WittRingPtr& W, const std::vector<long long>& eis,
                            const RingElem& pi_prime_in_R);
TensorElem t_zero(const TensorRing& T, int len = -1);
TensorElem t_one(const TensorRing& T, int len = -1);
TensorElem t_from_witt(const TensorRing& T, const WittVec& w);
TensorElem t_pi_prime(const TensorRing& T, int len = -1);      // pi' (x) 1
TensorElem t_teich_pi_prime(const TensorRing& T, int len = -1);  // 1 (x) [pi']
TensorElem t_add(const TensorRing& T, const TensorElem& a, const TensorElem& b);
TensorElem t_sub(const TensorRing& T, const TensorElem& a, const TensorElem& b);
TensorElem t_neg(const TensorRing& T, const TensorElem& a);
TensorElem t_mul(const TensorRing& T, const TensorElem& a, const TensorElem& b);
TensorElem t_sigma(const TensorRing& T, const TensorElem& a);      // id (x) F
TensorElem t_versch(const TensorRing& T, const TensorElem& a);     // id (x) V
TensorElem t_versch_inv(const TensorRing& T, const TensorElem& a);
bool t_eq(const TensorRing& T, const TensorElem& a, const TensorElem& b, int upto = -1);
bool t_in_aug_ideal(const TensorRing& T, const TensorElem& a);     // J = ker(-> R)
bool t_in_scalar_ideal(const TensorRing& T, const TensorElem& a);  // O' (x) I_O(R)
TensorElem t_inverse(const TensorRing& T, const TensorElem& a);    // units only
bool t_is_unit(const TensorRing& T, const TensorElem& a);          // residue test
TensorElem t_random(const TensorRing& T, std::mt19937_64& rng, int len = -1);

// ---- Lubin-Tate frame data ---------------------------------------------------

struct LTFrame {
    TensorRing T;
    TensorElem theta;   // Lemma-12.5-style element (built, then verified)
    TensorElem kappa;   // V^{-1}(theta (pi' (x) 1 - 1 (x) [pi']))
    TensorElem xi0;     // pi' (x) 1 - 1 (x) [pi']
};

// builds theta by the geometric-series expansion with Teichmueller lifts and
// verifies both defining properties (throws on failure); also computes kappa
// with its unit certificate
LTFrame make_lt_frame(const WittRingPtr& W, const std::vector<long long>& eis,
                      const RingElem& pi_prime_in_R);

// sigma-dot of the frame: xi -> V^{-1}(theta xi)
TensorElem frame_sigma_dot(const LTFrame& F, const TensorElem& xi);
// sigma-dot of the frame with an arbitrary unit kappa (decomposition-based)
TensorElem frame_sigma_dot_kappa(const TensorRing& T, const TensorElem& kappa,
                                 const TensorElem& theta_for_F1, const TensorElem& xi);

// valuation of theta's image in O' (x) W_O(O'/pi') = O' (needs R = O' itself)
int theta_image_valuation(const LTFrame& F);

// F(1) determined by kappa (the rank-one display reconstruction)
TensorElem lt_display_f1(const LTFrame& F, const TensorElem& kappa);

// rank-one display conversions between the O-display Frobenius and the
// frame-window operator; round trip is exact for the canonical frame unit
struct RankOneDisplay {
    TensorElem f1;       // F(1)
    TensorElem fdot_xi0; // Fdot(pi' (x) 1 - 1 (x) [pi'])
};
TensorElem convert_to_window_op(const LTFrame& F, const RankOneDisplay& D);   // F'(1)
RankOneDisplay convert_from_window_op(const LTFrame& F, const TensorElem& f1prime);

// natural map W_O(R) -> W_O'(R) for a totally ramified extension inside R:
// sum (pi/pi')^i V'^i [x_i]; Frobenius-equivariant, alpha V = (pi/pi') V' alpha
WittVec base_morphism(const WittRingPtr& source, const WittRingPtr& target, const WittVec& x);

}  // namespace orbilat
