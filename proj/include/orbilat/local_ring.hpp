#pragma once

// Exact truncated arithmetic in O_E for E/E0 an unramified quadratic
// extension of p-adic fields (p odd).  E0 is built as
//     unramified part  GR(p^M, f0)  =  Z[x]/(h(x), p^M),  h irreducible mod p,
//     ramified part    ...[t]/(eis(t)),  eis Eisenstein over the unramified part,
// and E = E0(omega) with omega^2 = c, c a lift of a non-square unit of the
// residue field.  Galois conjugation sigma fixes E0 and sends omega -> -omega.
//
// Elements carry a denominator exponent k and represent pi^{-k} * (integral
// part); the integral part is stored as coordinates mod p^M in the monomial
// basis x^i omega^j t^k.  Equality and zero tests are precision-relative:
// two elements agree iff they agree modulo pi^{N - max(denom)}.

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "orbilat/errors.hpp"

namespace orbilat {

// Sentinel for "zero at working precision": valuation at least this.
inline constexpr int kValInf = 1 << 28;

struct FieldSpec {
    long long p = 3;
    int f0 = 1;                   // inertia degree of the unramified part of E0 over Q_p
    std::vector<long long> eis;   // Eisenstein coefficients, little-endian, monic; empty = unramified
    bool quadratic = true;        // true: model E (unramified quadratic over E0); false: model E0

    int ram_degree() const { return eis.empty() ? 1 : static_cast<int>(eis.size()) - 1; }
    bool operator==(const FieldSpec& o) const {
        return p == o.p && f0 == o.f0 && eis == o.eis && quadratic == o.quadratic;
    }
};

class LocalRing;
using RingPtr = std::shared_ptr<const LocalRing>;

// Coordinate block: up to 12 residue coordinates (e * fE <= 12 enforced).
struct Coords {
    std::array<std::uint64_t, 12> v{};
};

class RingElem {
  public:
    RingElem() = default;
    RingElem(RingPtr ring, int denom, Coords c) : ring_(std::move(ring)), denom_(denom), c_(c) {}

    const RingPtr& ring() const { return ring_; }
    int denom() const { return denom_; }
    const Coords& coords() const { return c_; }

    RingElem operator+(const RingElem& o) const;
    RingElem operator-(const RingElem& o) const;
    RingElem operator*(const RingElem& o) const;
    RingElem operator-() const;
    bool operator==(const RingElem& o) const;
    bool operator!=(const RingElem& o) const { return !(*this == o); }

  private:
    friend class LocalRing;
    RingPtr ring_;
    int denom_ = 0;
    Coords c_{};
};

class LocalRing : public std::enable_shared_from_this<LocalRing> {
  public:
    // make_ring: N is the requested pi-adic precision (N >= 2); the ring
    // stores coordinates mod p^M with M = ceil(N/e), so the effective
    // precision is e*M >= N.
    static RingPtr make(const FieldSpec& spec, int N);

    const FieldSpec& spec() const { return spec_; }
    long long p() const { return spec_.p; }
    int f0() const { return spec_.f0; }
    int fE() const { return fE_; }                  // degree of the unramified part over Q_p
    int e() const { return e_; }                    // ramification degree
    bool quadratic() const { return spec_.quadratic; }
    long long q() const { return q_; }              // residue cardinality of E0
    long long residue_size() const { return qres_; }  // residue cardinality of the ring itself
    int precision() const { return requested_N_; }  // pi-adic working precision
    int stored_depth() const { return e_ * M_; }    // pi-digits actually stored (with guard)
    int pdepth() const { return M_; }               // coordinates live mod p^M
    std::uint64_t pmod() const { return pmod_; }    // p^M
    int width() const { return fE_; }
    int ncoords() const { return e_ * fE_; }

    RingPtr with_precision(int N) const { return make(spec_, N); }

    // -- element constructors -------------------------------------------------
    RingElem zero() const;
    RingElem one() const;
    RingElem from_int(long long a) const;
    RingElem pi() const;          // the uniformizer (p if unramified, t otherwise)
    RingElem pi_pow(int k) const; // pi^k, k may be negative
    RingElem omega() const;       // sqrt of the lifted non-residue (quadratic only)
    RingElem from_coords(int denom, const Coords& c) const;
    RingElem random_integral(std::mt19937_64& rng, int height) const;  // coords mod p^min(height,M)
    RingElem random_unit(std::mt19937_64& rng, int height) const;

    // -- arithmetic ------------------------------------------------------------
    RingElem add(const RingElem& a, const RingElem& b) const;
    RingElem sub(const RingElem& a, const RingElem& b) const;
    RingElem mul(const RingElem& a, const RingElem& b) const;
    RingElem neg(const RingElem& a) const;
    RingElem inverse(const RingElem& a) const;      // any element with finite valuation
    RingElem sigma(const RingElem& a) const;        // Galois conjugation of E/E0
    RingElem div_by_pi(const RingElem& a) const;    // exact; throws InexactDivision
    RingElem div_exact(const RingElem& a, const RingElem& b) const;

    // valuation; kValInf means "zero at working precision" (caller beware:
    // zero detection is precision-relative).
    int valuation(const RingElem& a) const;
    bool is_zero(const RingElem& a) const { return valuation(a) >= kValInf; }
    bool equal(const RingElem& a, const RingElem& b) const { return is_zero(sub(a, b)); }

    // canonical representative of a modulo pi^s (s may be negative); the
    // result's pi-adic digits at exponents >= s are zero.
    RingElem canonical_mod(const RingElem& a, long long s) const;

    // strips common pi powers into the denominator; keeps denom minimal
    RingElem normalize(const RingElem& a) const;

    bool in_base_field(const RingElem& a) const;    // sigma-fixed part exactly zero
    RingElem teichmuller(const RingElem& a) const;  // multiplicative lift of the residue of a

    // coercion between representations (E0-ring <-> E-ring with same base data)
    RingElem coerce(const RingElem& a, const RingPtr& target) const;

    // the q+1 norm-one residue representatives (Construction 9.10 count):
    // pairwise distinct mod pi, each with Nm_{E/E0}(a) = 1 at working precision
    std::vector<RingElem> norm_one_residues() const;

    // residue field helpers: residue of an integral element as coordinates mod p
    std::vector<std::uint64_t> residue(const RingElem& a) const;
    bool residue_is_zero(const RingElem& a) const;

    std::string to_string(const RingElem& a) const;

    bool same_ring(const LocalRing& o) const { return spec_ == o.spec_ && M_ == o.M_; }
    bool same_spec(const LocalRing& o) const { return spec_ == o.spec_; }

  private:
    LocalRing() = default;

    // coordinate-level kernels
    void c_add(const Coords& a, const Coords& b, Coords& out) const;
    void c_sub(const Coords& a, const Coords& b, Coords& out) const;
    void c_neg(const Coords& a, Coords& out) const;
    void c_mul(const Coords& a, const Coords& b, Coords& out) const;
    bool c_div_pi(const Coords& c, Coords& out) const;
    RingElem mul_pi(const RingElem& a) const;
    void u_mul(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out) const;  // unramified part
    void g_mul(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out) const;  // Galois-ring part
    bool c_is_zero(const Coords& a) const;
    int c_valuation(const Coords& a) const;  // pi-adic, kValInf if zero mod p^M

    std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t addmod(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t submod(std::uint64_t a, std::uint64_t b) const;

    FieldSpec spec_;
    int requested_N_ = 0;
    int M_ = 0;
    int e_ = 1;
    int fE_ = 1;
    long long q_ = 0;
    long long qres_ = 0;
    std::uint64_t pmod_ = 0;
    std::vector<std::uint64_t> h_tail_;     // x^f0 = -(h_0 + ... + h_{f0-1} x^{f0-1}), mod p^M
    std::vector<std::uint64_t> nonres_;     // c with omega^2 = c (f0 coords), quadratic only
    std::vector<Coords> eis_tail_;          // t^e = -(a_0 + a_1 t + ...): coords of a_k (k < e)
    Coords p_div_pi_;                       // the element p / pi (unit times pi^{e-1})
    bool p_div_pi_ready_ = false;
};

// free-function spellings used throughout
inline RingElem sigma(const RingElem& a) { return a.ring()->sigma(a); }
inline int valuation(const RingElem& a) { return a.ring()->valuation(a); }
inline RingElem inverse(const RingElem& a) { return a.ring()->inverse(a); }
inline bool is_zero(const RingElem& a) { return a.ring()->is_zero(a); }

RingPtr make_ring(const FieldSpec& spec, int N);

}  // namespace orbilat
