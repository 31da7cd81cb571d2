#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fglab/error.hpp"

namespace fglab {

using Int = mpz_class;
using Rat = mpq_class;

inline Int int_from_string(const std::string& s)
{
    return Int(s);
}

inline bool is_probable_prime(const Int& p)
{
    return p > 1 && mpz_probab_prime_p(p.get_mpz_t(), 32) != 0;
}

// ---------------------------------------------------------------------------
// Ring descriptors
// ---------------------------------------------------------------------------

enum class RingKind { Integers, Rationals, ModP, Poly, Localized };

struct Ring;
using RingPtr = std::shared_ptr<const Ring>;

struct PolyGen {
    std::string name;
    int weight = 1;

    friend bool operator==(const PolyGen& a, const PolyGen& b)
    {
        return a.name == b.name && a.weight == b.weight;
    }
};

/// A ring descriptor. Descriptors are immutable and shared; equality is
/// structural (same_ring) so that independently constructed descriptors of
/// the same ring interoperate.
struct Ring {
    RingKind kind = RingKind::Integers;
    Int p;                        // ModP
    RingPtr base;                 // Poly, Localized
    std::vector<PolyGen> gens;    // Poly
    std::vector<Int> inverted;    // Localized: positive, sorted, deduplicated

    static RingPtr integers()
    {
        static RingPtr z = std::make_shared<Ring>(Ring{RingKind::Integers, 0, nullptr, {}, {}});
        return z;
    }

    static RingPtr rationals()
    {
        static RingPtr q = std::make_shared<Ring>(Ring{RingKind::Rationals, 0, nullptr, {}, {}});
        return q;
    }

    static RingPtr modp(const Int& p)
    {
        if (!is_probable_prime(p))
            raise(errc::invalid_argument, "ModP modulus must be prime, got " + p.get_str());
        return std::make_shared<Ring>(Ring{RingKind::ModP, p, nullptr, {}, {}});
    }

    static RingPtr poly(RingPtr base, std::vector<PolyGen> gens)
    {
        for (size_t i = 0; i < gens.size(); ++i) {
            if (gens[i].weight < 1)
                raise(errc::invalid_argument, "generator weight must be >= 1");
            for (size_t j = i + 1; j < gens.size(); ++j)
                if (gens[i].name == gens[j].name)
                    raise(errc::invalid_argument, "duplicate generator name " + gens[i].name);
        }
        return std::make_shared<Ring>(Ring{RingKind::Poly, 0, std::move(base), std::move(gens), {}});
    }

    static RingPtr localized(RingPtr base, std::vector<Int> inverted)
    {
        std::vector<Int> inv;
        for (auto& n : inverted) {
            if (n == 0)
                raise(errc::invalid_argument, "cannot invert zero");
            Int a = abs(n);
            if (a != 1)
                inv.push_back(a);
        }
        std::sort(inv.begin(), inv.end());
        inv.erase(std::unique(inv.begin(), inv.end()), inv.end());
        return std::make_shared<Ring>(
            Ring{RingKind::Localized, 0, std::move(base), {}, std::move(inv)});
    }

    int gen_index(const std::string& name) const
    {
        for (size_t i = 0; i < gens.size(); ++i)
            if (gens[i].name == name)
                return static_cast<int>(i);
        return -1;
    }
};

inline bool same_ring(const RingPtr& a, const RingPtr& b)
{
    if (a == b)
        return true;
    if (!a || !b || a->kind != b->kind)
        return false;
    switch (a->kind) {
        case RingKind::Integers:
        case RingKind::Rationals: return true;
        case RingKind::ModP: return a->p == b->p;
        case RingKind::Poly: return a->gens == b->gens && same_ring(a->base, b->base);
        case RingKind::Localized:
            return a->inverted == b->inverted && same_ring(a->base, b->base);
    }
    return false;
}

inline std::string ring_name(const RingPtr& r)
{
    switch (r->kind) {
        case RingKind::Integers: return "Z";
        case RingKind::Rationals: return "Q";
        case RingKind::ModP: return "Z/" + r->p.get_str();
        case RingKind::Poly: {
            std::string s = ring_name(r->base) + "[";
            for (size_t i = 0; i < r->gens.size(); ++i)
                s += (i ? "," : "") + r->gens[i].name;
            return s + "]";
        }
        case RingKind::Localized: {
            std::string s = ring_name(r->base) + "[1/(";
            for (size_t i = 0; i < r->inverted.size(); ++i)
                s += (i ? "*" : "") + r->inverted[i].get_str();
            return s + ")]";
        }
    }
    return "?";
}

/// The primes dividing any product of the inverted set.
inline std::vector<Int> inverted_primes(const std::vector<Int>& inverted)
{
    std::vector<Int> primes;
    for (Int n : inverted) {
        n = abs(n);
        for (Int d = 2; d * d <= n; ++d) {
            if (n % d == 0) {
                primes.push_back(d);
                while (n % d == 0)
                    n /= d;
            }
        }
        if (n > 1)
            primes.push_back(n);
    }
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    return primes;
}

/// true iff every prime factor of n divides some element of the inverted set.
inline bool is_smooth_over(const Int& n_in, const std::vector<Int>& inverted)
{
    Int n = abs(n_in);
    if (n == 0)
        return false;
    for (const Int& p : inverted_primes(inverted))
        while (n % p == 0)
            n /= p;
    return n == 1;
}

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

class Scalar;
struct PolyTerms;
using PolyTermsPtr = std::shared_ptr<const PolyTerms>;

/// An exact ring element. Immutable value type; every operation returns a
/// fresh value. Payload interpretation depends on ring->kind:
///   Integers   z
///   Rationals  q (lowest terms, positive denominator; mpq invariant)
///   ModP       z (least non-negative residue)
///   Poly       poly (sparse, no zero terms, graded-lex key order)
///   Localized  payload of base ring as numerator + den (>0, smooth over the
///              inverted set, coprime to the numerator content)
class Scalar {
public:
    Scalar() : ring_(Ring::integers()), z_(0), den_(1) {}

    RingPtr ring() const { return ring_; }

    static Scalar zero(const RingPtr& r) { return from_int(r, 0); }
    static Scalar one(const RingPtr& r) { return from_int(r, 1); }
    static Scalar from_int(const RingPtr& r, const Int& n);
    static Scalar from_rat(const RingPtr& r, const Rat& q);
    static Scalar make_poly(const RingPtr& r, std::map<std::vector<int>, Scalar> terms);
    static Scalar make_localized(const RingPtr& r, Scalar numerator, const Int& den);

    /// the distinguished generator `name` of a Poly ring
    static Scalar gen(const RingPtr& r, const std::string& name);

    bool is_zero() const;
    bool is_one() const { return *this == one(ring_); }

    const Int& int_value() const { return z_; }
    const Rat& rat_value() const { return q_; }
    const Int& denominator() const { return den_; }
    const std::map<std::vector<int>, Scalar>& poly_terms() const;
    Scalar localized_numerator() const;

    /// constant (degree-zero) content of a Poly value as a base-ring scalar
    Scalar poly_constant() const;

    friend Scalar operator+(const Scalar& a, const Scalar& b);
    friend Scalar operator-(const Scalar& a, const Scalar& b);
    friend Scalar operator*(const Scalar& a, const Scalar& b);
    friend Scalar operator-(const Scalar& a);
    Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
    Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
    Scalar& operator*=(const Scalar& b) { return *this = *this * b; }

    friend bool operator==(const Scalar& a, const Scalar& b);
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    std::string str() const;

private:
    RingPtr ring_;
    Int z_;            // Integers / ModP / Localized-over-Z numerator
    Rat q_;            // Rationals
    PolyTermsPtr poly_; // Poly / Localized-over-Poly numerator
    Int den_ = 1;      // Localized denominator

    friend Scalar exact_div(const Scalar& a, const Scalar& b);
    friend struct ScalarOps;
};

struct PolyTerms {
    std::map<std::vector<int>, Scalar> terms;
};

namespace detail {

inline const std::map<std::vector<int>, Scalar>& empty_terms()
{
    static const std::map<std::vector<int>, Scalar> e;
    return e;
}

inline PolyTermsPtr share_terms(std::map<std::vector<int>, Scalar> m)
{
    auto p = std::make_shared<PolyTerms>();
    p->terms = std::move(m);
    return p;
}

inline int weighted_degree(const std::vector<PolyGen>& gens, const std::vector<int>& exps)
{
    int d = 0;
    for (size_t i = 0; i < exps.size(); ++i)
        d += gens[i].weight * exps[i];
    return d;
}

/// graded-lex: compare weighted degree first, then exponent vectors
/// lexicographically. Total order on monomials of one Poly ring.
inline bool graded_lex_less(const std::vector<PolyGen>& gens, const std::vector<int>& a,
                            const std::vector<int>& b)
{
    int da = weighted_degree(gens, a), db = weighted_degree(gens, b);
    if (da != db)
        return da < db;
    return a < b;
}

} // namespace detail

// -- basic queries ----------------------------------------------------------

inline const std::map<std::vector<int>, Scalar>& Scalar::poly_terms() const
{
    return poly_ ? poly_->terms : detail::empty_terms();
}

inline bool Scalar::is_zero() const
{
    switch (ring_->kind) {
        case RingKind::Integers:
        case RingKind::ModP: return z_ == 0;
        case RingKind::Rationals: return q_ == 0;
        case RingKind::Poly: return poly_terms().empty();
        case RingKind::Localized:
            return ring_->base->kind == RingKind::Poly ? poly_terms().empty() : z_ == 0;
    }
    return true;
}

// -- constructors -----------------------------------------------------------

inline Scalar Scalar::from_int(const RingPtr& r, const Int& n)
{
    Scalar s;
    s.ring_ = r;
    switch (r->kind) {
        case RingKind::Integers: s.z_ = n; break;
        case RingKind::Rationals: s.q_ = Rat(n); break;
        case RingKind::ModP: {
            s.z_ = n % r->p;
            if (s.z_ < 0)
                s.z_ += r->p;
            break;
        }
        case RingKind::Poly: {
            Scalar c = from_int(r->base, n);
            std::map<std::vector<int>, Scalar> m;
            if (!c.is_zero())
                m.emplace(std::vector<int>(r->gens.size(), 0), std::move(c));
            s.poly_ = detail::share_terms(std::move(m));
            break;
        }
        case RingKind::Localized: {
            Scalar num = from_int(r->base, n);
            return make_localized(r, std::move(num), 1);
        }
    }
    return s;
}

inline Scalar Scalar::from_rat(const RingPtr& r, const Rat& q)
{
    switch (r->kind) {
        case RingKind::Rationals: {
            Scalar s;
            s.ring_ = r;
            s.q_ = q;
            return s;
        }
        case RingKind::Integers: {
            if (q.get_den() != 1)
                raise(errc::inexact_division, "rational " + q.get_str() + " is not an integer");
            return from_int(r, q.get_num());
        }
        case RingKind::Poly: {
            Scalar c = from_rat(r->base, q);
            Scalar s;
            s.ring_ = r;
            std::map<std::vector<int>, Scalar> m;
            if (!c.is_zero())
                m.emplace(std::vector<int>(r->gens.size(), 0), std::move(c));
            s.poly_ = detail::share_terms(std::move(m));
            return s;
        }
        case RingKind::Localized: {
            if (!is_smooth_over(q.get_den(), r->inverted))
                raise(errc::inexact_division,
                      "denominator " + q.get_den().get_str() + " not invertible in " + ring_name(r));
            return make_localized(r, from_int(r->base, q.get_num()), q.get_den());
        }
        case RingKind::ModP: {
            // q = a/b with b invertible mod p
            Int b = q.get_den() % r->p;
            if (b == 0)
                raise(errc::inexact_division, "denominator divisible by " + r->p.get_str());
            Int binv;
            mpz_invert(binv.get_mpz_t(), b.get_mpz_t(), r->p.get_mpz_t());
            return from_int(r, q.get_num() * binv);
        }
    }
    raise(errc::invalid_argument, "from_rat: unsupported ring");
}

inline Scalar Scalar::make_poly(const RingPtr& r, std::map<std::vector<int>, Scalar> terms)
{
    if (r->kind != RingKind::Poly)
        raise(errc::ring_mismatch, "make_poly on non-polynomial ring");
    for (auto it = terms.begin(); it != terms.end();) {
        if (it->first.size() != r->gens.size())
            raise(errc::dimension_mismatch, "exponent vector length mismatch");
        if (!same_ring(it->second.ring(), r->base))
            raise(errc::ring_mismatch, "polynomial coefficient in wrong ring");
        if (it->second.is_zero())
            it = terms.erase(it);
        else
            ++it;
    }
    Scalar s;
    s.ring_ = r;
    s.poly_ = detail::share_terms(std::move(terms));
    return s;
}

// integer content of Z / Poly-over-Z values (0 for zero)
namespace detail {
inline Int int_content(const Scalar& v)
{
    switch (v.ring()->kind) {
        case RingKind::Integers: return abs(v.int_value());
        case RingKind::Poly: {
            Int g = 0;
            for (const auto& [e, c] : v.poly_terms()) {
                Int gc = int_content(c);
                mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), gc.get_mpz_t());
                if (g == 1)
                    break;
            }
            return g;
        }
        default: return 1;
    }
}
} // namespace detail

inline Scalar Scalar::make_localized(const RingPtr& r, Scalar numerator, const Int& den_in)
{
    if (r->kind != RingKind::Localized)
        raise(errc::ring_mismatch, "make_localized on non-localized ring");
    if (!same_ring(numerator.ring(), r->base))
        raise(errc::ring_mismatch, "localized numerator in wrong ring");
    Int den = den_in;
    if (den == 0)
        raise(errc::invalid_argument, "zero denominator");
    if (den < 0) {
        den = -den;
        numerator = -numerator;
    }
    // reduce the fraction by the gcd of the numerator's integer content
    Int c = detail::int_content(numerator);
    Int g;
    mpz_gcd(g.get_mpz_t(), c.get_mpz_t(), den.get_mpz_t());
    if (g > 1) {
        numerator = exact_div(numerator, Scalar::from_int(r->base, g));
        den /= g;
    }
    if (numerator.is_zero())
        den = 1;
    if (den != 1 && !is_smooth_over(den, r->inverted))
        raise(errc::inexact_division,
              "denominator " + den.get_str() + " not invertible in " + ring_name(r));
    Scalar s;
    s.ring_ = r;
    s.den_ = den;
    if (r->base->kind == RingKind::Poly)
        s.poly_ = detail::share_terms(numerator.poly_terms());
    else
        s.z_ = numerator.int_value();
    return s;
}

inline Scalar Scalar::localized_numerator() const
{
    if (ring_->kind != RingKind::Localized)
        raise(errc::ring_mismatch, "not a localized value");
    Scalar s;
    s.ring_ = ring_->base;
    if (ring_->base->kind == RingKind::Poly)
        s.poly_ = poly_ ? poly_ : detail::share_terms({});
    else
        s.z_ = z_;
    return s;
}

inline Scalar Scalar::gen(const RingPtr& r, const std::string& name)
{
    if (r->kind != RingKind::Poly)
        raise(errc::ring_mismatch, "gen() on non-polynomial ring");
    int idx = r->gen_index(name);
    if (idx < 0)
        raise(errc::invalid_argument, "no generator named " + name);
    std::vector<int> e(r->gens.size(), 0);
    e[idx] = 1;
    std::map<std::vector<int>, Scalar> m;
    m.emplace(std::move(e), Scalar::one(r->base));
    return make_poly(r, std::move(m));
}

inline Scalar Scalar::poly_constant() const
{
    const RingPtr poly_ring = ring_->kind == RingKind::Poly ? ring_ : ring_->base;
    if (!poly_ring || poly_ring->kind != RingKind::Poly)
        raise(errc::ring_mismatch, "poly_constant on non-polynomial value");
    std::vector<int> zero_exp(poly_ring->gens.size(), 0);
    auto it = poly_terms().find(zero_exp);
    return it == poly_terms().end() ? Scalar::zero(poly_ring->base) : it->second;
}

// -- arithmetic -------------------------------------------------------------

namespace detail {

inline void require_same_ring(const Scalar& a, const Scalar& b, const char* op)
{
    if (!same_ring(a.ring(), b.ring()))
        raise(errc::ring_mismatch, std::string(op) + ": " + ring_name(a.ring()) + " vs " +
                                       ring_name(b.ring()));
}

inline std::map<std::vector<int>, Scalar> poly_add(const std::map<std::vector<int>, Scalar>& a,
                                                   const std::map<std::vector<int>, Scalar>& b)
{
    auto out = a;
    for (const auto& [e, c] : b) {
        auto it = out.find(e);
        if (it == out.end()) {
            out.emplace(e, c);
        } else {
            it->second = it->second + c;
            if (it->second.is_zero())
                out.erase(it);
        }
    }
    return out;
}

inline std::map<std::vector<int>, Scalar> poly_mul(const std::map<std::vector<int>, Scalar>& a,
                                                   const std::map<std::vector<int>, Scalar>& b)
{
    std::map<std::vector<int>, Scalar> out;
    std::vector<int> e;
    for (const auto& [ea, ca] : a) {
        for (const auto& [eb, cb] : b) {
            e = ea;
            for (size_t i = 0; i < e.size(); ++i)
                e[i] += eb[i];
            Scalar prod = ca * cb;
            if (prod.is_zero())
                continue;
            auto it = out.find(e);
            if (it == out.end()) {
                out.emplace(e, std::move(prod));
            } else {
                it->second = it->second + prod;
                if (it->second.is_zero())
                    out.erase(it);
            }
        }
    }
    return out;
}

} // namespace detail

inline Scalar operator+(const Scalar& a, const Scalar& b)
{
    detail::require_same_ring(a, b, "add");
    Scalar s;
    s.ring_ = a.ring_;
    switch (a.ring_->kind) {
        case RingKind::Integers: s.z_ = a.z_ + b.z_; break;
        case RingKind::Rationals: s.q_ = a.q_ + b.q_; break;
        case RingKind::ModP: {
            s.z_ = (a.z_ + b.z_) % a.ring_->p;
            break;
        }
        case RingKind::Poly:
            s.poly_ = detail::share_terms(detail::poly_add(a.poly_terms(), b.poly_terms()));
            break;
        case RingKind::Localized: {
            // a_num/a_den + b_num/b_den over the common denominator
            Int g;
            mpz_gcd(g.get_mpz_t(), a.den_.get_mpz_t(), b.den_.get_mpz_t());
            Int la = b.den_ / g, lb = a.den_ / g;
            Scalar num = a.localized_numerator() * Scalar::from_int(a.ring_->base, la) +
                         b.localized_numerator() * Scalar::from_int(a.ring_->base, lb);
            return Scalar::make_localized(a.ring_, std::move(num), a.den_ * la);
        }
    }
    return s;
}

inline Scalar operator-(const Scalar& a)
{
    Scalar s;
    s.ring_ = a.ring_;
    s.den_ = a.den_;
    switch (a.ring_->kind) {
        case RingKind::Integers: s.z_ = -a.z_; break;
        case RingKind::Rationals: s.q_ = -a.q_; break;
        case RingKind::ModP: s.z_ = a.z_ == 0 ? Int(0) : Int(a.ring_->p - a.z_); break;
        case RingKind::Poly:
        case RingKind::Localized: {
            if (a.ring_->kind == RingKind::Localized && a.ring_->base->kind != RingKind::Poly) {
                s.z_ = -a.z_;
                break;
            }
            std::map<std::vector<int>, Scalar> m;
            for (const auto& [e, c] : a.poly_terms())
                m.emplace(e, -c);
            s.poly_ = detail::share_terms(std::move(m));
            break;
        }
    }
    return s;
}

inline Scalar operator-(const Scalar& a, const Scalar& b)
{
    return a + (-b);
}

inline Scalar operator*(const Scalar& a, const Scalar& b)
{
    detail::require_same_ring(a, b, "mul");
    Scalar s;
    s.ring_ = a.ring_;
    switch (a.ring_->kind) {
        case RingKind::Integers: s.z_ = a.z_ * b.z_; break;
        case RingKind::Rationals: s.q_ = a.q_ * b.q_; break;
        case RingKind::ModP: s.z_ = (a.z_ * b.z_) % a.ring_->p; break;
        case RingKind::Poly:
            s.poly_ = detail::share_terms(detail::poly_mul(a.poly_terms(), b.poly_terms()));
            break;
        case RingKind::Localized:
            return Scalar::make_localized(
                a.ring_, a.localized_numerator() * b.localized_numerator(), a.den_ * b.den_);
    }
    return s;
}

inline bool operator==(const Scalar& a, const Scalar& b)
{
    if (!same_ring(a.ring(), b.ring()))
        return false;
    switch (a.ring()->kind) {
        case RingKind::Integers:
        case RingKind::ModP: return a.z_ == b.z_;
        case RingKind::Rationals: return a.q_ == b.q_;
        case RingKind::Poly: return a.poly_terms() == b.poly_terms();
        case RingKind::Localized:
            if (a.den_ != b.den_)
                return false;
            return a.ring()->base->kind == RingKind::Poly ? a.poly_terms() == b.poly_terms()
                                                          : a.z_ == b.z_;
    }
    return false;
}

// -- exact division ---------------------------------------------------------

namespace detail {

/// Multivariate exact division by repeated graded-lex leading-term reduction.
/// Succeeds exactly when b divides a in base[gens]; otherwise throws.
inline std::map<std::vector<int>, Scalar>
poly_exact_div(const RingPtr& ring, const std::map<std::vector<int>, Scalar>& a_in,
               const std::map<std::vector<int>, Scalar>& b)
{
    if (b.empty())
        raise(errc::inexact_division, "division by zero polynomial");
    // leading term of b under graded-lex (largest)
    auto blead = b.begin();
    for (auto it = b.begin(); it != b.end(); ++it)
        if (graded_lex_less(ring->gens, blead->first, it->first))
            blead = it;

    auto rem = a_in;
    std::map<std::vector<int>, Scalar> quot;
    while (!rem.empty()) {
        auto rlead = rem.begin();
        for (auto it = rem.begin(); it != rem.end(); ++it)
            if (graded_lex_less(ring->gens, rlead->first, it->first))
                rlead = it;
        std::vector<int> e(rlead->first.size());
        for (size_t i = 0; i < e.size(); ++i) {
            e[i] = rlead->first[i] - blead->first[i];
            if (e[i] < 0)
                raise(errc::inexact_division, "monomial not divisible");
        }
        Scalar c = exact_div(rlead->second, blead->second);
        quot.emplace(e, c);
        // rem -= c * x^e * b
        std::map<std::vector<int>, Scalar> piece;
        piece.emplace(std::move(e), std::move(c));
        auto sub = poly_mul(piece, b);
        for (auto& [k, v] : sub)
            v = -v;
        rem = poly_add(rem, sub);
    }
    return quot;
}

} // namespace detail

/// Exact division in the ring; throws InexactDivision when the quotient does
/// not lie in the ring. For Localized rings the result's denominator must
/// stay a product of inverted primes.
inline Scalar exact_div(const Scalar& a, const Scalar& b)
{
    detail::require_same_ring(a, b, "exact_div");
    if (b.is_zero())
        raise(errc::inexact_division, "division by zero");
    switch (a.ring()->kind) {
        case RingKind::Integers: {
            Int q, r;
            mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.z_.get_mpz_t(), b.z_.get_mpz_t());
            if (r != 0)
                raise(errc::inexact_division,
                      b.z_.get_str() + " does not divide " + a.z_.get_str());
            return Scalar::from_int(a.ring(), q);
        }
        case RingKind::Rationals: {
            Scalar s;
            s.ring_ = a.ring_;
            s.q_ = a.q_ / b.q_;
            return s;
        }
        case RingKind::ModP: {
            Int binv;
            if (mpz_invert(binv.get_mpz_t(), b.z_.get_mpz_t(), a.ring()->p.get_mpz_t()) == 0)
                raise(errc::inexact_division, "non-invertible residue");
            return Scalar::from_int(a.ring(), a.z_ * binv);
        }
        case RingKind::Poly: {
            Scalar s;
            s.ring_ = a.ring_;
            s.poly_ = detail::share_terms(
                detail::poly_exact_div(a.ring(), a.poly_terms(), b.poly_terms()));
            return s;
        }
        case RingKind::Localized: {
            // (an/ad) / (bn/bd) = an*bd / (ad*bn); bn must divide an*bd up to
            // an invertible integer.
            Scalar an = a.localized_numerator(), bn = b.localized_numerator();
            Int bc = detail::int_content(bn);
            // strip the integer content of bn into the denominator
            Scalar bprim = bc == 1 ? bn : exact_div(bn, Scalar::from_int(a.ring()->base, bc));
            Scalar num = exact_div(an * Scalar::from_int(a.ring()->base, b.den_), bprim);
            return Scalar::make_localized(a.ring(), std::move(num), a.den_ * bc);
        }
    }
    raise(errc::invalid_argument, "exact_div: unsupported ring");
}

inline Scalar pow(const Scalar& a, long e)
{
    if (e < 0)
        raise(errc::invalid_argument, "negative scalar power");
    Scalar r = Scalar::one(a.ring());
    Scalar base = a;
    while (e > 0) {
        if (e & 1)
            r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

// -- printing ---------------------------------------------------------------

inline std::string Scalar::str() const
{
    switch (ring_->kind) {
        case RingKind::Integers:
        case RingKind::ModP: return z_.get_str();
        case RingKind::Rationals: return q_.get_str();
        case RingKind::Poly: {
            if (poly_terms().empty())
                return "0";
            std::ostringstream os;
            bool first = true;
            for (const auto& [e, c] : poly_terms()) {
                if (!first)
                    os << " + ";
                first = false;
                os << "(" << c.str() << ")";
                for (size_t i = 0; i < e.size(); ++i)
                    if (e[i] != 0) {
                        os << "*" << ring_->gens[i].name;
                        if (e[i] != 1)
                            os << "^" << e[i];
                    }
            }
            return os.str();
        }
        case RingKind::Localized: {
            std::string n = localized_numerator().str();
            if (den_ == 1)
                return n;
            return "(" + n + ")/" + den_.get_str();
        }
    }
    return "?";
}

inline std::ostream& operator<<(std::ostream& os, const Scalar& s)
{
    return os << s.str();
}

// ---------------------------------------------------------------------------
// Ring homomorphisms
// ---------------------------------------------------------------------------

/// Canonical coercion of a value into a compatible larger ring:
/// Z -> Q / ModP / Localized / any Poly base extension, Poly -> Poly with a
/// superset of generators (matched by name, equal weights), Localized ->
/// Localized with a superset of inverted primes. Throws RingMismatch when no
/// canonical map exists, InexactDivision when the value does not fit.
inline Scalar convert(const Scalar& v, const RingPtr& target)
{
    if (same_ring(v.ring(), target))
        return v;
    const RingPtr src = v.ring();
    switch (src->kind) {
        case RingKind::Integers: return Scalar::from_int(target, v.int_value());
        case RingKind::Rationals: return Scalar::from_rat(target, v.rat_value());
        case RingKind::Poly: {
            if (target->kind == RingKind::Localized)
                return Scalar::make_localized(target, convert(v, target->base), 1);
            if (target->kind != RingKind::Poly)
                raise(errc::ring_mismatch,
                      "cannot convert " + ring_name(src) + " into " + ring_name(target));
            std::vector<int> remap(src->gens.size());
            for (size_t i = 0; i < src->gens.size(); ++i) {
                int j = target->gen_index(src->gens[i].name);
                if (j < 0 || target->gens[j].weight != src->gens[i].weight)
                    raise(errc::ring_mismatch, "generator " + src->gens[i].name +
                                                   " missing in " + ring_name(target));
                remap[i] = j;
            }
            std::map<std::vector<int>, Scalar> out;
            for (const auto& [e, c] : v.poly_terms()) {
                std::vector<int> te(target->gens.size(), 0);
                for (size_t i = 0; i < e.size(); ++i)
                    te[remap[i]] = e[i];
                out.emplace(std::move(te), convert(c, target->base));
            }
            return Scalar::make_poly(target, std::move(out));
        }
        case RingKind::Localized: {
            if (target->kind == RingKind::Localized) {
                Scalar num = convert(v.localized_numerator(), target->base);
                return Scalar::make_localized(target, std::move(num), v.denominator());
            }
            if (target->kind == RingKind::Rationals && src->base->kind == RingKind::Integers)
                return Scalar::from_rat(target, Rat(v.int_value(), v.denominator()));
            if (v.denominator() == 1)
                return convert(v.localized_numerator(), target);
            raise(errc::inexact_division, "value has a denominator, target " + ring_name(target));
        }
        case RingKind::ModP:
        default:
            raise(errc::ring_mismatch,
                  "cannot convert " + ring_name(src) + " into " + ring_name(target));
    }
}

/// Evaluate a polynomial value by substituting images for its generators.
/// Generators without an entry map to their namesakes in the target ring.
inline Scalar subst_gens(const Scalar& v, const std::map<std::string, Scalar>& images,
                         const RingPtr& target)
{
    const RingPtr src = v.ring();
    if (src->kind == RingKind::Localized) {
        Scalar num = subst_gens(v.localized_numerator(), images, target);
        Scalar den = Scalar::from_int(target, v.denominator());
        return exact_div(num, den);
    }
    if (src->kind != RingKind::Poly)
        return convert(v, target);
    std::vector<Scalar> gen_img;
    gen_img.reserve(src->gens.size());
    for (const auto& g : src->gens) {
        auto it = images.find(g.name);
        if (it != images.end()) {
            if (!same_ring(it->second.ring(), target))
                raise(errc::ring_mismatch, "generator image in wrong ring");
            gen_img.push_back(it->second);
        } else {
            gen_img.push_back(Scalar::gen(target, g.name)); // throws if absent
        }
    }
    Scalar acc = Scalar::zero(target);
    for (const auto& [e, c] : v.poly_terms()) {
        Scalar term = subst_gens(c, images, target);
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] != 0)
                term = term * pow(gen_img[i], e[i]);
        acc = acc + term;
    }
    return acc;
}

/// Drop polynomial monomials of weighted degree > cap. Identity on
/// non-polynomial values. Sound for graded pipelines: weights only add under
/// multiplication, so degrees <= cap are unaffected by dropped terms.
inline Scalar trim_scalar_weight(const Scalar& v, int cap)
{
    if (cap < 0)
        return v;
    const RingPtr r = v.ring();
    if (r->kind == RingKind::Poly) {
        std::map<std::vector<int>, Scalar> out;
        for (const auto& [e, c] : v.poly_terms())
            if (detail::weighted_degree(r->gens, e) <= cap)
                out.emplace(e, c);
        return Scalar::make_poly(r, std::move(out));
    }
    if (r->kind == RingKind::Localized && r->base->kind == RingKind::Poly) {
        Scalar num = trim_scalar_weight(v.localized_numerator(), cap);
        return Scalar::make_localized(r, std::move(num), v.denominator());
    }
    return v;
}

/// Weighted degree of a Poly (or Localized-over-Poly) value; -1 for zero.
/// Throws NonHomogeneous if mixed degrees are present and `require_homogeneous`.
inline int poly_degree(const Scalar& v, bool require_homogeneous = false)
{
    const RingPtr r = v.ring()->kind == RingKind::Localized ? v.ring()->base : v.ring();
    if (r->kind != RingKind::Poly)
        return v.is_zero() ? -1 : 0;
    int deg = -1;
    for (const auto& [e, c] : v.poly_terms()) {
        int d = detail::weighted_degree(r->gens, e);
        if (deg == -1)
            deg = d;
        else if (d != deg) {
            if (require_homogeneous)
                raise(errc::non_homogeneous, "value has mixed degrees " + std::to_string(deg) +
                                                 " and " + std::to_string(d));
            deg = std::max(deg, d);
        }
    }
    return deg;
}

} // namespace fglab
