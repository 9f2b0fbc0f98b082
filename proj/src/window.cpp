#include "orbilat/window.hpp"

namespace orbilat {

namespace {

WittVec witt_inverse(const WittRingPtr& W, const WittVec& x) {
    const RingPtr& R = W->coeff_ring();
    if (x.c.empty() || R->residue_is_zero(x.c[0])) throw SpecError("Witt vector is not a unit");
    int len = x.len();
    WittVec z = W->teichmuller(R->inverse(x.c[0]), len);
    WittVec two = W->from_int(2, len);
    int iters = 4;
    for (int t = 1; t < W->m() * R->stored_depth(); t *= 2) ++iters;
    for (int i = 0; i < iters; ++i) {
        WittVec az = W->mul(x, z);
        if (W->eq(az, W->one(len))) break;
        z = W->mul(z, W->sub(two, az));
    }
    if (!W->eq(W->mul(x, z), W->one(len))) throw PrecisionError("Witt inversion did not converge");
    return z;
}

}  // namespace

WMat wmat_identity(const WittRingPtr& W, int n) {
    WMat M;
    M.n = n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M.a.push_back(i == j ? W->one() : W->zero());
    return M;
}

WMat wmat_mul(const WittRingPtr& W, const WMat& A, const WMat& B) {
    WMat C;
    C.n = A.n;
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j) {
            WittVec acc = W->zero();
            for (int k = 0; k < A.n; ++k) acc = W->add(acc, W->mul(A.at(i, k), B.at(k, j)));
            C.a.push_back(acc);
        }
    return C;
}

WMat wmat_transpose(const WMat& A) {
    WMat C;
    C.n = A.n;
    C.a = A.a;
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j) C.a[static_cast<std::size_t>(i) * A.n + j] = A.at(j, i);
    return C;
}

WMat wmat_inverse(const WittRingPtr& W, const WMat& A) {
    WMat C;
    C.n = A.n;
    if (A.n == 1) {
        C.a.push_back(witt_inverse(W, A.at(0, 0)));
        return C;
    }
    if (A.n == 2) {
        WittVec det = W->sub(W->mul(A.at(0, 0), A.at(1, 1)), W->mul(A.at(0, 1), A.at(1, 0)));
        WittVec dinv = witt_inverse(W, det);
        C.a = {W->mul(dinv, A.at(1, 1)), W->mul(dinv, W->neg(A.at(0, 1))),
               W->mul(dinv, W->neg(A.at(1, 0))), W->mul(dinv, A.at(0, 0))};
        return C;
    }
    throw SpecError("window ranks above 2 are not supported");
}

WVec wmat_apply_sigma(const WittRingPtr& W, const WMat& A, const WVec& v) {
    WVec out;
    for (int i = 0; i < A.n; ++i) {
        WittVec acc = W->zero(v[0].len() - 1);
        for (int k = 0; k < A.n; ++k) acc = W->add(acc, W->mul(A.at(i, k), W->frobenius(v[k])));
        out.push_back(acc);
    }
    return out;
}

bool wvec_eq(const WittRingPtr& W, const WVec& a, const WVec& b, int upto) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!W->eq(a[i], b[i], upto)) return false;
    return true;
}

Window make_window(const WittRingPtr& W, int rank, int rL, const WMat& phi) {
    if (rank < 1 || rank > 2 || rL < 0 || rL > rank) throw SpecError("unsupported window shape");
    (void)wmat_inverse(W, phi);  // must be invertible
    Window win;
    win.W = W;
    win.rank = rank;
    win.rL = rL;
    win.phi = phi;
    return win;
}

Window dual_window(const Window& win) {
    Window d;
    d.W = win.W;
    d.rank = win.rank;
    d.rL = win.rL;  // the roles of the parts swap inside Q^vee
    d.phi = wmat_inverse(win.W, wmat_transpose(win.phi));
    return d;
}

WVec window_fdot(const Window& win, const WVec& q) {
    const WittRingPtr& W = win.W;
    // pre-apply sigma on the L-part, sigma-dot (= V^{-1}) on the T-part
    WVec twisted;
    for (int i = 0; i < win.rank; ++i) {
        if (i < win.rL) {
            twisted.push_back(W->frobenius(q[i]));
        } else {
            twisted.push_back(W->versch_inverse(q[i]));
        }
    }
    WVec out;
    for (int i = 0; i < win.rank; ++i) {
        WittVec acc = W->zero(twisted[0].len());
        for (int k = 0; k < win.rank; ++k) acc = W->add(acc, W->mul(win.phi.at(i, k), twisted[k]));
        out.push_back(acc);
    }
    return out;
}

WVec window_fdot_dual(const Window& win, const WVec& q) {
    const WittRingPtr& W = win.W;
    WMat M = wmat_inverse(W, wmat_transpose(win.phi));
    // Q^vee = I L^vee + T^vee: sigma-dot on the first rL coordinates,
    // sigma on the rest
    WVec twisted;
    for (int i = 0; i < win.rank; ++i) {
        if (i < win.rL) {
            twisted.push_back(W->versch_inverse(q[i]));
        } else {
            twisted.push_back(W->frobenius(q[i]));
        }
    }
    WVec out;
    for (int i = 0; i < win.rank; ++i) {
        WittVec acc = W->zero(twisted[0].len());
        for (int k = 0; k < win.rank; ++k) acc = W->add(acc, W->mul(M.at(i, k), twisted[k]));
        out.push_back(acc);
    }
    return out;
}

WittVec pairing(const WittRingPtr& W, const WVec& a, const WVec& b) {
    WittVec acc = W->zero(std::min(a[0].len(), b[0].len()));
    for (std::size_t i = 0; i < a.size(); ++i) acc = W->add(acc, W->mul(a[i], b[i]));
    return acc;
}

WindowCheck pairing_check(const Window& win, std::mt19937_64& rng, int trials) {
    const WittRingPtr& W = win.W;
    const RingPtr& R = W->coeff_ring();
    WindowCheck out;
    // double dual returns the original operator
    Window dd = dual_window(dual_window(win));
    for (int i = 0; i < win.rank; ++i)
        for (int j = 0; j < win.rank; ++j)
            if (!W->eq(dd.phi.at(i, j), win.phi.at(i, j))) {
                out.pass = false;
                out.note = "double dual mismatch";
                return out;
            }
    auto random_w = [&](int len) {
        std::vector<RingElem> c;
        for (int i = 0; i < len; ++i) c.push_back(R->random_integral(rng, 2));
        return W->from_coords(c);
    };
    for (int t = 0; t < trials; ++t) {
        // q in Q: S-coefficients on L, V-image entries on T
        WVec q, qd;
        for (int i = 0; i < win.rank; ++i) {
            if (i < win.rL)
                q.push_back(random_w(W->m()));
            else
                q.push_back(W->verschiebung(random_w(W->m() - 1)));
        }
        // q^vee in Q^vee: V-image entries on L^vee, S-coefficients on T^vee
        for (int i = 0; i < win.rank; ++i) {
            if (i < win.rL)
                qd.push_back(W->verschiebung(random_w(W->m() - 1)));
            else
                qd.push_back(random_w(W->m()));
        }
        // <Q, Q^vee> lands in I
        WittVec pq = pairing(W, q, qd);
        if (!W->in_verschiebung_image(pq)) {
            out.pass = false;
            out.note = "pairing left the ideal";
            return out;
        }
        WVec lhs_a = window_fdot(win, q);
        WVec lhs_b = window_fdot_dual(win, qd);
        WittVec lhs = pairing(W, lhs_a, lhs_b);
        WittVec rhs = W->versch_inverse(pq);
        if (!W->eq(lhs, rhs, W->m() - 1)) {
            out.pass = false;
            out.note = "pairing compatibility failed";
            return out;
        }
    }
    return out;
}

WindowCheck epsilon_twist_check(const Window& win, const WittVec& eps, std::mt19937_64& rng,
                                int trials) {
    const WittRingPtr& W = win.W;
    const RingPtr& R = W->coeff_ring();
    WindowCheck out;
    WittVec u = W->mul(W->frobenius(eps), witt_inverse(W, eps));
    u.c.resize(W->m() - 1, R->zero());
    WittVec uinv = witt_inverse(W, u);
    WMat M = wmat_inverse(W, wmat_transpose(win.phi));
    auto op = [&](bool first, const WVec& x) {
        // first:  diag(1 on L^vee, u^{-1} on T^vee) M sigma(x)
        // second: diag(u on L^vee, 1 on T^vee) M sigma(x)
        WVec y = wmat_apply_sigma(W, M, x);
        for (int i = 0; i < win.rank; ++i) {
            if (first && i >= win.rL) y[i] = W->mul(uinv, y[i]);
            if (!first && i < win.rL) y[i] = W->mul(u, y[i]);
        }
        return y;
    };
    auto random_w = [&](int len) {
        std::vector<RingElem> c;
        for (int i = 0; i < len; ++i) c.push_back(R->random_integral(rng, 2));
        return W->from_coords(c);
    };
    for (int t = 0; t < trials; ++t) {
        WVec x;
        for (int i = 0; i < win.rank; ++i) x.push_back(random_w(W->m()));
        WVec ex = x;
        for (auto& v : ex) v = W->mul(eps, v);
        WVec lhs = op(true, ex);               // twisted-dual operator applied to eps x
        WVec rhs = op(false, x);
        for (auto& v : rhs) v = W->mul(eps, v);  // eps times the dual-of-twisted operator
        if (!wvec_eq(W, lhs, rhs, W->m() - 1)) {
            out.pass = false;
            out.note = "epsilon does not intertwine the twisted duals";
            return out;
        }
    }
    return out;
}

}  // namespace orbilat
