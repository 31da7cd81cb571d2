#pragma once

#include <optional>
#include <string>
#include <utility>

#include "fglab/series.hpp"

namespace fglab {

/// A (commutative, one-dimensional) formal group law F(x,y) over an exact
/// scalar ring, stored as its full series to the given truncation. The
/// coefficients a_{i,j} are read off as series coefficients.
struct FormalGroupLaw {
    RingPtr ring;
    int trunc = 0;          // identities hold for total (x,y,...)-degree <= trunc
    TruncSeries F;          // series in (x, y), both weight 1

    static VarTablePtr xy_table()
    {
        static VarTablePtr t = VarTable::make({"x", "y"});
        return t;
    }

    static FormalGroupLaw from_series(TruncSeries F)
    {
        FormalGroupLaw law;
        law.ring = F.ring();
        law.trunc = F.trunc();
        law.F = std::move(F);
        return law;
    }

    /// F(x,y) = x + y
    static FormalGroupLaw additive(const RingPtr& ring, int trunc)
    {
        TruncSeries F = TruncSeries::var(ring, xy_table(), trunc, "x") +
                        TruncSeries::var(ring, xy_table(), trunc, "y");
        return from_series(std::move(F));
    }

    /// F(x,y) = x + y - xy  (the K_0 law)
    static FormalGroupLaw multiplicative(const RingPtr& ring, int trunc)
    {
        TruncSeries x = TruncSeries::var(ring, xy_table(), trunc, "x");
        TruncSeries y = TruncSeries::var(ring, xy_table(), trunc, "y");
        return from_series(x + y - x * y);
    }

    /// coefficient a_{i,j} of x^i y^j
    Scalar a(int i, int j) const { return F.coeff({i, j}); }
};

/// Outcome of the FGL axiom check: on failure, `axiom` names the first
/// violated identity and `monomial` is the graded-lex lowest offending
/// exponent vector of the defect series.
struct FglCheck {
    bool ok = true;
    std::string axiom;            // "unit", "commutativity", "associativity"
    std::vector<int> monomial;
    Scalar defect;

    explicit operator bool() const { return ok; }
};

namespace detail {

inline std::optional<std::pair<std::vector<int>, Scalar>> lowest_term(const TruncSeries& s)
{
    if (s.is_zero())
        return std::nullopt;
    auto it = s.terms().begin();
    return std::make_pair(it->first, it->second);
}

} // namespace detail

/// F(a, b) for nilpotent arguments over the same scalar ring.
inline TruncSeries formal_sum(const FormalGroupLaw& law, const TruncSeries& a,
                              const TruncSeries& b)
{
    return substitute(law.F, {{"x", a}, {"y", b}});
}

inline FglCheck fgl_check(const FormalGroupLaw& law)
{
    const RingPtr& R = law.ring;
    const int N = law.trunc;
    auto fail = [&](const char* axiom, const TruncSeries& defect) {
        FglCheck c;
        c.ok = false;
        c.axiom = axiom;
        auto low = detail::lowest_term(defect);
        c.monomial = low->first;
        c.defect = low->second;
        return c;
    };

    // unit: F(x,0) = x, F(0,y) = y
    auto vars = law.F.vars();
    TruncSeries zero(R, vars, N);
    TruncSeries x = TruncSeries::var(R, vars, N, "x");
    TruncSeries y = TruncSeries::var(R, vars, N, "y");
    TruncSeries ux = formal_sum(law, x, zero) - x;
    if (!ux.is_zero())
        return fail("unit", ux);
    TruncSeries uy = formal_sum(law, zero, y) - y;
    if (!uy.is_zero())
        return fail("unit", uy);

    // commutativity: F(x,y) = F(y,x)
    TruncSeries comm = law.F - substitute(law.F, {{"x", y}, {"y", x}});
    if (!comm.is_zero())
        return fail("commutativity", comm);

    // associativity: F(F(x,y),z) = F(x,F(y,z)) in three variables
    auto xyz = VarTable::make({"x", "y", "z"});
    TruncSeries x3 = TruncSeries::var(R, xyz, N, "x");
    TruncSeries y3 = TruncSeries::var(R, xyz, N, "y");
    TruncSeries z3 = TruncSeries::var(R, xyz, N, "z");
    TruncSeries fxy = substitute(law.F, {{"x", x3}, {"y", y3}});
    TruncSeries fyz = substitute(law.F, {{"x", y3}, {"y", z3}});
    TruncSeries lhs = substitute(law.F, {{"x", fxy}, {"y", z3}});
    TruncSeries rhs = substitute(law.F, {{"x", x3}, {"y", fyz}});
    TruncSeries assoc = lhs - rhs;
    if (!assoc.is_zero())
        return fail("associativity", assoc);

    return {};
}

/// chi_F, the formal inverse: F(x, chi(x)) = 0, solved degree by degree.
inline TruncSeries formal_inverse(const FormalGroupLaw& law)
{
    const int N = law.trunc;
    auto vx = VarTable::make({"x"});
    TruncSeries x = TruncSeries::var(law.ring, vx, N, "x");
    TruncSeries chi = -x;
    for (int deg = 2; deg <= N; ++deg) {
        TruncSeries err = substitute(law.F, {{"x", x}, {"y", chi}});
        TruncSeries fix(law.ring, vx, N);
        for (const auto& [e, c] : err.terms())
            if (vx->wdeg(e) == deg)
                fix.set_coeff(e, -c);
        if (!fix.is_zero())
            chi = chi + fix;
    }
    return chi;
}

/// [n]-series: [0]=0, [n+1]=F(x,[n]), [-n]=chi([n]). Recursive so it stays
/// integral over Z and Z/p.
inline TruncSeries n_series(const FormalGroupLaw& law, long n)
{
    auto vx = VarTable::make({"x"});
    TruncSeries x = TruncSeries::var(law.ring, vx, law.trunc, "x");
    bool negate = n < 0;
    if (negate)
        n = -n;
    TruncSeries acc(law.ring, vx, law.trunc);
    for (long i = 0; i < n; ++i)
        acc = formal_sum(law, x, acc);
    if (negate)
        acc = substitute(formal_inverse(law), {{"x", acc}});
    return acc;
}

/// invariant-form coefficient series w with omega = w(x) dx,
/// w = (dF/dy at y=0)^{-1}. Exact over any ring.
inline TruncSeries invariant_form(const FormalGroupLaw& law)
{
    // dF/dy|_{y=0} = sum_i a_{i,1} x^i as a univariate series
    auto vx = VarTable::make({"x"});
    TruncSeries d(law.ring, vx, law.trunc);
    for (const auto& [e, c] : law.F.terms())
        if (e[1] == 1)
            d.set_coeff({e[0]}, c);
    return invert_unit(d);
}

/// log_F over a ring admitting division by the integers up to trunc:
/// log' = w, integrated termwise. Throws InexactDivision otherwise.
inline TruncSeries fgl_log(const FormalGroupLaw& law)
{
    TruncSeries w = invariant_form(law);
    TruncSeries out(law.ring, w.vars(), law.trunc);
    for (const auto& [e, c] : w.terms()) {
        int k = e[0];
        if (k + 1 > law.trunc)
            continue;
        out.set_coeff({k + 1}, exact_div(c, Scalar::from_int(law.ring, k + 1)));
    }
    return out;
}

inline TruncSeries fgl_exp(const FormalGroupLaw& law)
{
    return reversion(fgl_log(law), "x");
}

/// F^gamma(x,y) = gamma(F(gamma^{-1} x, gamma^{-1} y)); gamma univariate in x
/// over the same ring with invertible leading coefficient.
inline FormalGroupLaw reparametrize(const FormalGroupLaw& law, const TruncSeries& gamma)
{
    TruncSeries gi = reversion(gamma, "x");
    auto xy = law.F.vars();
    TruncSeries gix = substitute(gi, {{"x", TruncSeries::var(law.ring, xy, law.trunc, "x")}});
    TruncSeries giy = substitute(gi, {{"x", TruncSeries::var(law.ring, xy, law.trunc, "y")}});
    TruncSeries inner = formal_sum(law, gix, giy);
    TruncSeries g_on_xy = gamma.with_vars(xy);
    return FormalGroupLaw::from_series(substitute(g_on_xy, {{"x", inner}}));
}

/// Result of the shifted-FGL integrality test.
struct ShiftedFglReport {
    bool integral = true;
    int i = 0, j = 0;    // offending coefficient position
    Scalar offender;     // value over the localization
    FormalGroupLaw shifted; // over the localized ring
};

/// Test whether F^gamma, computed over B[b0^{-1}], has all coefficients in B.
/// Supported rings: the leading coefficient must be a nonzero integer
/// constant (syntactic non-zero-divisor check).
inline ShiftedFglReport shifted_fgl_integral(const FormalGroupLaw& law,
                                             const TruncSeries& gamma)
{
    std::vector<int> e1(gamma.vars()->size(), 0);
    e1[gamma.vars()->index("x")] = 1;
    Scalar b0 = gamma.coeff(e1);
    // extract an integer constant from b0
    Int b0int;
    switch (b0.ring()->kind) {
        case RingKind::Integers: b0int = b0.int_value(); break;
        case RingKind::Poly: {
            Scalar c = b0.poly_constant();
            if (!(b0 == Scalar::from_int(b0.ring(), c.int_value())))
                raise(errc::invalid_argument,
                      "b0 must be an integer constant for the integrality test");
            b0int = c.int_value();
            break;
        }
        default:
            raise(errc::invalid_argument, "unsupported ring for shifted-FGL test");
    }
    if (b0int == 0)
        raise(errc::non_invertible_leading_coefficient, "b0 = 0 is a zero divisor");

    RingPtr loc = Ring::localized(law.ring, {b0int});
    auto lift = [&](const Scalar& s) { return convert(s, loc); };
    FormalGroupLaw law_loc = FormalGroupLaw::from_series(law.F.map_scalars(loc, lift));
    TruncSeries gamma_loc = gamma.map_scalars(loc, lift);
    FormalGroupLaw shifted = reparametrize(law_loc, gamma_loc);

    ShiftedFglReport rep;
    rep.shifted = shifted;
    for (const auto& [e, c] : shifted.F.terms()) {
        if (c.denominator() == 1)
            continue;
        rep.integral = false;
        rep.i = e[0];
        rep.j = e[1];
        rep.offender = c;
        return rep;
    }
    return rep;
}

/// d(r) = gcd of the interior binomial coefficients C(r,i), 0 < i < r.
inline Int dr_gcd(long r)
{
    if (r < 2)
        raise(errc::invalid_argument, "dr_gcd needs r >= 2");
    Int g = 0, binom = 1;
    for (long i = 1; i < r; ++i) {
        binom = binom * (r - i + 1) / i; // exact: running binomial C(r,i)
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), binom.get_mpz_t());
        if (g == 1)
            break;
    }
    return g;
}

/// To(V) = prod_i (gamma(x)/x)(lambda_i) for nilpotent roots over the roots'
/// common table.
inline TruncSeries todd_series(const TruncSeries& gamma,
                               const std::vector<TruncSeries>& roots)
{
    // gamma(x)/x as a series with (possibly) nonzero constant term
    int xi = gamma.vars()->index("x");
    if (xi < 0)
        raise(errc::var_mismatch, "gamma must be a series in x");
    std::vector<int> e1(gamma.vars()->size(), 0);
    e1[xi] = 1;
    Scalar b0 = gamma.coeff(e1);
    try {
        exact_div(Scalar::one(gamma.ring()), b0);
    } catch (const error&) {
        raise(errc::non_invertible_leading_coefficient, "gamma leading coefficient " + b0.str());
    }
    TruncSeries q(gamma.ring(), gamma.vars(), gamma.trunc());
    for (const auto& [e, c] : gamma.terms()) {
        std::vector<int> ne = e;
        ne[xi] -= 1;
        if (ne[xi] < 0)
            raise(errc::non_nilpotent_substitution, "gamma has a constant term");
        q.set_coeff(std::move(ne), c);
    }
    if (roots.empty())
        return TruncSeries::one(gamma.ring(), VarTable::make({}), gamma.trunc());
    TruncSeries acc = TruncSeries::one(roots[0].ring(), roots[0].vars(), roots[0].trunc());
    for (const auto& lam : roots)
        acc = acc * substitute(q, {{"x", lam}});
    return acc;
}

inline Int ring_characteristic(const RingPtr& r)
{
    switch (r->kind) {
        case RingKind::ModP: return r->p;
        case RingKind::Poly:
        case RingKind::Localized: return ring_characteristic(r->base);
        default: return 0;
    }
}

/// Over a char-p ring, write gamma(x) = delta(x^{p^k}) with k maximal.
inline std::pair<int, TruncSeries> frobenius_height(const TruncSeries& gamma)
{
    Int p = ring_characteristic(gamma.ring());
    if (p == 0)
        raise(errc::invalid_argument, "frobenius_height needs a char-p ring");
    if (gamma.is_zero())
        raise(errc::zero_series, "frobenius_height of the zero series");
    int xi = gamma.vars()->index("x");
    long g = 0;
    for (const auto& [e, c] : gamma.terms())
        g = std::gcd(g, static_cast<long>(e[xi]));
    int k = 0;
    long pk = 1;
    long pl = p.get_si();
    while (g % (pk * pl) == 0) {
        pk *= pl;
        ++k;
    }
    TruncSeries delta(gamma.ring(), gamma.vars(), gamma.trunc());
    for (const auto& [e, c] : gamma.terms()) {
        std::vector<int> ne = e;
        ne[xi] = e[xi] / static_cast<int>(pk);
        delta.set_coeff(std::move(ne), c);
    }
    return {k, delta};
}

} // namespace fglab
