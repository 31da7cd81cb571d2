#pragma once

#include <climits>
#include <map>
#include <string>

#include "fglab/series.hpp"

namespace fglab {

/// Laurent series in one distinguished variable t with TruncSeries
/// coefficients: sum_k coef[k] * t^k, bounded below, with a reliable upper
/// exponent (coefficients above `hi` are unknown, not zero). All coefficients
/// share one ring / body variable table / body truncation.
class LaurentSeries {
public:
    static constexpr int kHiInf = INT_MAX / 4;

    LaurentSeries() = default;

    LaurentSeries(RingPtr ring, VarTablePtr body_vars, int body_trunc, int hi,
                  std::string tname = "t")
        : ring_(std::move(ring)), body_vars_(std::move(body_vars)), body_trunc_(body_trunc),
          hi_(hi), tname_(std::move(tname))
    {
    }

    static LaurentSeries constant(const RingPtr& ring, const VarTablePtr& vars, int body_trunc,
                                  int hi, const Scalar& c)
    {
        LaurentSeries s(ring, vars, body_trunc, hi);
        TruncSeries body = TruncSeries::constant(ring, vars, body_trunc, c);
        if (!body.is_zero() && hi >= 0)
            s.coef_.emplace(0, std::move(body));
        return s;
    }

    /// body series placed at t-exponent k
    static LaurentSeries from_body(const TruncSeries& body, int k, int hi)
    {
        LaurentSeries s(body.ring(), body.vars(), body.trunc(), hi);
        if (!body.is_zero() && k <= hi)
            s.coef_.emplace(k, body);
        return s;
    }

    /// split the variable `tname` of a plain truncated series into the
    /// Laurent exponent (all exponents nonnegative here)
    static LaurentSeries from_trunc(const TruncSeries& f, const std::string& tname, int hi)
    {
        int ti = f.vars()->index(tname);
        if (ti < 0)
            raise(errc::var_mismatch, "no variable " + tname);
        std::vector<std::string> names;
        std::vector<int> weights;
        for (size_t i = 0; i < f.vars()->size(); ++i)
            if (static_cast<int>(i) != ti) {
                names.push_back(f.vars()->names[i]);
                weights.push_back(f.vars()->weights[i]);
            }
        auto body_vars = VarTable::make(names, weights);
        LaurentSeries out(f.ring(), body_vars, f.trunc(), std::min(hi, f.trunc()), tname);
        for (const auto& [e, c] : f.terms()) {
            int k = e[ti];
            if (k > out.hi_)
                continue;
            std::vector<int> be;
            be.reserve(e.size() - 1);
            for (size_t i = 0; i < e.size(); ++i)
                if (static_cast<int>(i) != ti)
                    be.push_back(e[i]);
            auto it = out.coef_.find(k);
            if (it == out.coef_.end())
                it = out.coef_.emplace(k, TruncSeries(f.ring(), body_vars, f.trunc())).first;
            it->second.set_coeff(std::move(be), c);
        }
        out.prune();
        return out;
    }

    const RingPtr& ring() const { return ring_; }
    const VarTablePtr& body_vars() const { return body_vars_; }
    int body_trunc() const { return body_trunc_; }
    int hi() const { return hi_; }
    const std::string& tname() const { return tname_; }
    const std::map<int, TruncSeries>& coefs() const { return coef_; }

    bool is_zero() const { return coef_.empty(); }

    int min_exp() const { return coef_.empty() ? kHiInf : coef_.begin()->first; }

    TruncSeries coefficient_at(int k) const
    {
        auto it = coef_.find(k);
        return it == coef_.end() ? TruncSeries(ring_, body_vars_, body_trunc_) : it->second;
    }

    /// coefficient of t^{-1}
    TruncSeries residue() const { return coefficient_at(-1); }

    void set_coefficient(int k, TruncSeries c)
    {
        if (k > hi_)
            return;
        if (c.is_zero())
            coef_.erase(k);
        else
            coef_.insert_or_assign(k, std::move(c));
    }

    LaurentSeries with_hi(int new_hi) const
    {
        LaurentSeries out = *this;
        out.hi_ = std::min(out.hi_, new_hi);
        out.coef_.erase(out.coef_.upper_bound(out.hi_), out.coef_.end());
        return out;
    }

    friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b)
    {
        check_compat(a, b);
        LaurentSeries out = a.with_hi(std::min(a.hi_, b.hi_));
        for (const auto& [k, c] : b.coef_) {
            if (k > out.hi_)
                break;
            auto it = out.coef_.find(k);
            if (it == out.coef_.end())
                out.coef_.emplace(k, c);
            else {
                it->second = it->second + c;
                if (it->second.is_zero())
                    out.coef_.erase(it);
            }
        }
        return out;
    }

    friend LaurentSeries operator-(const LaurentSeries& a)
    {
        LaurentSeries out = a;
        for (auto& [k, c] : out.coef_)
            c = -c;
        return out;
    }

    friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b)
    {
        return a + (-b);
    }

    friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b)
    {
        check_compat(a, b);
        // reliable window: a term of unknown exponent > hi on one side meets
        // the lowest known exponent on the other
        int hi = std::min({a.hi_ == kHiInf || b.is_zero() ? kHiInf : a.hi_ + b.min_exp(),
                           b.hi_ == kHiInf || a.is_zero() ? kHiInf : b.hi_ + a.min_exp(),
                           kHiInf});
        LaurentSeries out(a.ring_, a.body_vars_, std::min(a.body_trunc_, b.body_trunc_), hi,
                          a.tname_);
        for (const auto& [ka, ca] : a.coef_) {
            for (const auto& [kb, cb] : b.coef_) {
                int k = ka + kb;
                if (k > out.hi_)
                    break;
                TruncSeries prod = ca * cb;
                if (prod.is_zero())
                    continue;
                auto it = out.coef_.find(k);
                if (it == out.coef_.end())
                    out.coef_.emplace(k, std::move(prod));
                else {
                    it->second = it->second + prod;
                    if (it->second.is_zero())
                        out.coef_.erase(it);
                }
            }
        }
        return out;
    }

    friend LaurentSeries operator*(const Scalar& s, const LaurentSeries& a)
    {
        LaurentSeries out = a;
        for (auto it = out.coef_.begin(); it != out.coef_.end();) {
            it->second = s * it->second;
            it = it->second.is_zero() ? out.coef_.erase(it) : std::next(it);
        }
        return out;
    }

    friend LaurentSeries operator*(const TruncSeries& s, const LaurentSeries& a)
    {
        LaurentSeries out = a;
        for (auto it = out.coef_.begin(); it != out.coef_.end();) {
            it->second = s * it->second;
            it = it->second.is_zero() ? out.coef_.erase(it) : std::next(it);
        }
        return out;
    }

    LaurentSeries pow(long n) const
    {
        if (n < 0)
            raise(errc::invalid_argument, "negative Laurent power");
        LaurentSeries r = constant(ring_, body_vars_, body_trunc_, hi_, Scalar::one(ring_));
        LaurentSeries base = *this;
        while (n > 0) {
            if (n & 1)
                r = r * base;
            if (n >>= 1)
                base = base * base;
        }
        return r;
    }

    /// shift by t^k
    LaurentSeries shifted(int k) const
    {
        LaurentSeries out(ring_, body_vars_, body_trunc_,
                          hi_ == kHiInf ? kHiInf : hi_ + k, tname_);
        for (const auto& [e, c] : coef_)
            out.coef_.emplace(e + k, c);
        return out;
    }

    LaurentSeries scalar_trimmed(int cap) const
    {
        if (cap < 0)
            return *this;
        LaurentSeries out = *this;
        for (auto it = out.coef_.begin(); it != out.coef_.end();) {
            it->second = it->second.scalar_trimmed(cap);
            it = it->second.is_zero() ? out.coef_.erase(it) : std::next(it);
        }
        return out;
    }

    LaurentSeries map_coefficients(const std::function<TruncSeries(const TruncSeries&)>& f) const
    {
        LaurentSeries out = *this;
        std::map<int, TruncSeries> nc;
        for (const auto& [k, c] : coef_) {
            TruncSeries img = f(c);
            if (!img.is_zero())
                nc.emplace(k, std::move(img));
        }
        out.coef_ = std::move(nc);
        if (!out.coef_.empty()) {
            out.ring_ = out.coef_.begin()->second.ring();
            out.body_vars_ = out.coef_.begin()->second.vars();
            out.body_trunc_ = out.coef_.begin()->second.trunc();
        }
        return out;
    }

    friend bool operator==(const LaurentSeries& a, const LaurentSeries& b)
    {
        return a.coef_ == b.coef_;
    }

    friend bool operator!=(const LaurentSeries& a, const LaurentSeries& b) { return !(a == b); }

    std::string str() const
    {
        if (coef_.empty())
            return "0";
        std::string s;
        for (const auto& [k, c] : coef_) {
            if (!s.empty())
                s += " + ";
            s += "(" + c.str() + ")";
            if (k != 0)
                s += "*" + tname_ + "^" + std::to_string(k);
        }
        return s;
    }

private:
    void prune()
    {
        for (auto it = coef_.begin(); it != coef_.end();)
            it = it->second.is_zero() ? coef_.erase(it) : std::next(it);
    }

    static void check_compat(const LaurentSeries& a, const LaurentSeries& b)
    {
        if (!same_ring(a.ring_, b.ring_))
            raise(errc::ring_mismatch, "Laurent series over different rings");
        if (!(*a.body_vars_ == *b.body_vars_))
            raise(errc::var_mismatch, "Laurent series over different body tables");
        if (a.tname_ != b.tname_)
            raise(errc::var_mismatch, "distinguished variables differ");
    }

    RingPtr ring_ = Ring::integers();
    VarTablePtr body_vars_ = VarTable::make({});
    int body_trunc_ = 0;
    int hi_ = 0;
    std::string tname_ = "t";
    std::map<int, TruncSeries> coef_;
};

/// Multiplicative inverse of u = t^k (unit + nilpotent) + higher reliable
/// terms: the lowest exponent whose coefficient has an invertible constant
/// scalar anchors the expansion; everything below it must be body-nilpotent
/// (no constant scalar term).
inline LaurentSeries laurent_invert(const LaurentSeries& u, int scalar_weight_cap = -1)
{
    if (u.is_zero())
        raise(errc::not_invertible, "zero Laurent series");
    int k = LaurentSeries::kHiInf;
    Scalar unit;
    for (const auto& [e, c] : u.coefs()) {
        Scalar c0 = c.constant_term();
        if (!c0.is_zero()) {
            try {
                exact_div(Scalar::one(u.ring()), c0);
            } catch (const error&) {
                raise(errc::not_invertible,
                      "lowest constant coefficient " + c0.str() + " is not a unit");
            }
            k = e;
            unit = c0;
            break;
        }
    }
    if (k == LaurentSeries::kHiInf)
        raise(errc::not_invertible, "no invertible term found");

    Scalar unit_inv = exact_div(Scalar::one(u.ring()), unit);
    // u = t^k * unit * (1 + w); compute (1+w)^{-1} as a terminating geometric
    // series: negative-offset parts of w are body-nilpotent, positive offsets
    // die at the reliable bound.
    LaurentSeries core = u.shifted(-k);
    LaurentSeries one =
        LaurentSeries::constant(u.ring(), u.body_vars(), u.body_trunc(), core.hi() - core.min_exp() + u.body_trunc() + 1,
                                Scalar::one(u.ring()));
    LaurentSeries w = (unit_inv * core - one).scalar_trimmed(scalar_weight_cap);
    LaurentSeries acc = one;
    LaurentSeries term = -w;
    long cap = static_cast<long>(u.body_trunc() + 2) *
                   (core.hi() >= LaurentSeries::kHiInf ? 1 : (core.hi() - core.min_exp() + 2)) +
               (scalar_weight_cap >= 0 ? scalar_weight_cap : 0) + 8;
    long i = 0;
    while (!term.is_zero()) {
        if (++i > cap)
            raise(errc::not_invertible, "geometric expansion did not terminate");
        acc = acc + term;
        term = (term * (-w)).scalar_trimmed(scalar_weight_cap);
    }
    return (unit_inv * acc).shifted(-k);
}

/// Substitute a Laurent series g for the body variable `name` of f. Every
/// term of g must have positive body degree, so powers terminate under the
/// body truncation. The result lives on g's body table.
inline LaurentSeries substitute_body_var(const LaurentSeries& f, const std::string& name,
                                         const LaurentSeries& g, int scalar_weight_cap = -1)
{
    for (const auto& [k, c] : g.coefs())
        if (!c.constant_term().is_zero())
            raise(errc::non_nilpotent_substitution,
                  "substitution image has a body-constant term at t^" + std::to_string(k));
    int xi = f.body_vars()->index(name);
    if (xi < 0)
        raise(errc::var_mismatch, "no body variable " + name);

    int hi = std::min(f.hi(), g.hi());
    LaurentSeries out(g.ring(), g.body_vars(), std::min(f.body_trunc(), g.body_trunc()), hi,
                      f.tname());
    std::map<int, LaurentSeries> pow_cache;
    auto gpow = [&](int n) -> const LaurentSeries& {
        auto it = pow_cache.find(n);
        if (it != pow_cache.end())
            return it->second;
        LaurentSeries p = g.with_hi(hi);
        LaurentSeries acc = LaurentSeries::constant(g.ring(), g.body_vars(), g.body_trunc(),
                                                    hi, Scalar::one(g.ring()));
        for (int i = 0; i < n; ++i)
            acc = (acc * p).scalar_trimmed(scalar_weight_cap);
        return pow_cache.emplace(n, std::move(acc)).first->second;
    };

    for (const auto& [k, body] : f.coefs()) {
        for (const auto& [e, c] : body.terms()) {
            // residual monomial without `name`
            std::vector<int> rest(g.body_vars()->size(), 0);
            bool ok = true;
            for (size_t i = 0; i < e.size(); ++i) {
                if (static_cast<int>(i) == xi || e[i] == 0)
                    continue;
                int j = g.body_vars()->index(f.body_vars()->names[i]);
                if (j < 0) {
                    ok = false;
                    break;
                }
                rest[j] = e[i];
            }
            if (!ok)
                raise(errc::var_mismatch, "body variable absent from substitution target");
            TruncSeries mono(out.ring(), out.body_vars(), out.body_trunc());
            mono.set_coeff(rest, c);
            LaurentSeries piece = LaurentSeries::from_body(mono, k, hi);
            if (e[xi] != 0)
                piece = (piece * gpow(e[xi])).scalar_trimmed(scalar_weight_cap);
            out = out + piece;
        }
    }
    return out;
}

/// Composition inverse in the body variable `name` of a Laurent-coefficient
/// series f = c0*x + c1*x^2 + ... (x-degree means the plain exponent of x).
inline LaurentSeries laurent_reversion(const LaurentSeries& f, const std::string& name,
                                       int xmax, int scalar_weight_cap = -1)
{
    int xi = f.body_vars()->index(name);
    if (xi < 0)
        raise(errc::var_mismatch, "no body variable " + name);
    // c0 = Laurent coefficient of x^1
    LaurentSeries c0(f.ring(), f.body_vars(), f.body_trunc(), f.hi(), f.tname());
    for (const auto& [k, body] : f.coefs()) {
        TruncSeries c = body.coefficient_of(name, 1);
        if (!c.is_zero())
            c0.set_coefficient(k, std::move(c));
    }
    LaurentSeries c0inv = laurent_invert(c0, scalar_weight_cap);

    auto xvar = [&](int e) {
        TruncSeries m(f.ring(), f.body_vars(), f.body_trunc());
        std::vector<int> ev(f.body_vars()->size(), 0);
        ev[xi] = e;
        m.set_coeff(std::move(ev), Scalar::one(f.ring()));
        return LaurentSeries::from_body(m, 0, f.hi());
    };

    LaurentSeries delta = c0inv * xvar(1);
    for (int deg = 2; deg <= xmax; ++deg) {
        LaurentSeries err =
            substitute_body_var(f, name, delta, scalar_weight_cap) - xvar(1);
        // the x^deg slice of the error
        LaurentSeries slice(f.ring(), f.body_vars(), f.body_trunc(), err.hi(), f.tname());
        for (const auto& [k, body] : err.coefs()) {
            TruncSeries c = body.coefficient_of(name, deg);
            if (!c.is_zero())
                slice.set_coefficient(k, std::move(c));
        }
        if (slice.is_zero())
            continue;
        delta = delta - ((c0inv * slice) * xvar(deg)).scalar_trimmed(scalar_weight_cap);
    }
    return delta;
}

} // namespace fglab
