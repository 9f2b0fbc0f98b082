#pragma once

// Windows over the Witt frame (W_O(R), I_O(R), R, F, V^{-1}) in ranks 1 and 2:
// the dual window, the canonical pairing compatibility, and the epsilon-twist
// isomorphism for scaled sigma-dot operators.
//
// A window is stored by its linearization Phi (invertible over W_O(R)) with a
// normal decomposition P = L + T given by the first rL coordinates.

#include "orbilat/witt.hpp"

namespace orbilat {

struct WMat {
    int n = 0;
    std::vector<WittVec> a;  // row-major
    WittVec& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    const WittVec& at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

using WVec = std::vector<WittVec>;

WMat wmat_identity(const WittRingPtr& W, int n);
WMat wmat_mul(const WittRingPtr& W, const WMat& A, const WMat& B);
WMat wmat_transpose(const WMat& A);
WMat wmat_inverse(const WittRingPtr& W, const WMat& A);  // ranks 1 and 2
WVec wmat_apply_sigma(const WittRingPtr& W, const WMat& A, const WVec& v);  // A * F(v)
bool wvec_eq(const WittRingPtr& W, const WVec& a, const WVec& b, int upto = -1);

struct Window {
    WittRingPtr W;
    int rank = 0;
    int rL = 0;   // size of the L-part of the normal decomposition
    WMat phi;     // invertible linearization
};

Window make_window(const WittRingPtr& W, int rank, int rL, const WMat& phi);

// dual window: operator (phi^T)^{-1} with the swapped normal decomposition
Window dual_window(const Window& win);

// Fdot on Q = L + I T: q given by coefficients (a_i in S for the L-part,
// xi_i in I for the T-part)
WVec window_fdot(const Window& win, const WVec& q);
// the dual window's Fdot, with the decomposition P^vee = L^vee + T^vee,
// Q^vee = I L^vee + T^vee
WVec window_fdot_dual(const Window& win, const WVec& q);
WittVec pairing(const WittRingPtr& W, const WVec& a, const WVec& b);

struct WindowCheck {
    bool pass = true;
    std::string note;
};

// Lemma-11.4-style compatibility: <Fdot q, Fdot^vee q^vee> = sigma-dot <q, q^vee>
// on the generator cases; also checks the double dual is the original
WindowCheck pairing_check(const Window& win, std::mt19937_64& rng, int trials = 4);

// epsilon-twist: for u = sigma(eps)/eps, multiplication by eps intertwines the
// two scaled dual operators arising from the u-twisted sigma-dot
WindowCheck epsilon_twist_check(const Window& win, const WittVec& eps, std::mt19937_64& rng,
                                int trials = 4);

}  // namespace orbilat
