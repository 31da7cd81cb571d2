#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fglab/ring.hpp"

namespace fglab {

/// Ordered variable table with positive integer weights. Truncation of a
/// TruncSeries is by weighted total degree over these variables; scalar
/// coefficients (which may themselves be graded polynomials) do not count
/// against it.
struct VarTable {
    std::vector<std::string> names;
    std::vector<int> weights;

    VarTable() = default;
    VarTable(std::vector<std::string> n, std::vector<int> w)
        : names(std::move(n)), weights(std::move(w))
    {
        if (names.size() != weights.size())
            raise(errc::dimension_mismatch, "names/weights size mismatch");
        for (size_t i = 0; i < names.size(); ++i) {
            if (weights[i] < 1)
                raise(errc::invalid_argument, "variable weight must be >= 1");
            for (size_t j = i + 1; j < names.size(); ++j)
                if (names[i] == names[j])
                    raise(errc::invalid_argument, "duplicate variable " + names[i]);
        }
    }

    static std::shared_ptr<const VarTable> make(std::vector<std::string> n)
    {
        std::vector<int> w(n.size(), 1);
        return std::make_shared<const VarTable>(std::move(n), std::move(w));
    }

    static std::shared_ptr<const VarTable> make(std::vector<std::string> n, std::vector<int> w)
    {
        return std::make_shared<const VarTable>(std::move(n), std::move(w));
    }

    size_t size() const { return names.size(); }

    int index(const std::string& name) const
    {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == name)
                return static_cast<int>(i);
        return -1;
    }

    int wdeg(const std::vector<int>& exps) const
    {
        int d = 0;
        for (size_t i = 0; i < exps.size(); ++i)
            d += weights[i] * exps[i];
        return d;
    }

    friend bool operator==(const VarTable& a, const VarTable& b)
    {
        return a.names == b.names && a.weights == b.weights;
    }
};

using VarTablePtr = std::shared_ptr<const VarTable>;

namespace detail {

struct GradedLexLess {
    VarTablePtr vars;
    bool operator()(const std::vector<int>& a, const std::vector<int>& b) const
    {
        int da = vars->wdeg(a), db = vars->wdeg(b);
        if (da != db)
            return da < db;
        return a < b;
    }
};

} // namespace detail

/// Sparse multivariate power series truncated by weighted total degree.
/// Coefficients in degrees > trunc are undefined (not zero); every operation
/// propagates the minimum reliable truncation of its inputs.
class TruncSeries {
public:
    using TermMap = std::map<std::vector<int>, Scalar, detail::GradedLexLess>;

    TruncSeries() : TruncSeries(Ring::integers(), VarTable::make({}), 0) {}

    TruncSeries(RingPtr ring, VarTablePtr vars, int trunc)
        : ring_(std::move(ring)), vars_(std::move(vars)), trunc_(trunc),
          terms_(detail::GradedLexLess{vars_})
    {
    }

    static TruncSeries constant(const RingPtr& ring, const VarTablePtr& vars, int trunc,
                                const Scalar& c)
    {
        TruncSeries s(ring, vars, trunc);
        if (!c.is_zero() && trunc >= 0)
            s.terms_.emplace(std::vector<int>(vars->size(), 0), c);
        return s;
    }

    static TruncSeries one(const RingPtr& ring, const VarTablePtr& vars, int trunc)
    {
        return constant(ring, vars, trunc, Scalar::one(ring));
    }

    static TruncSeries var(const RingPtr& ring, const VarTablePtr& vars, int trunc,
                           const std::string& name)
    {
        int i = vars->index(name);
        if (i < 0)
            raise(errc::var_mismatch, "unknown variable " + name);
        TruncSeries s(ring, vars, trunc);
        if (vars->weights[i] <= trunc) {
            std::vector<int> e(vars->size(), 0);
            e[i] = 1;
            s.terms_.emplace(std::move(e), Scalar::one(ring));
        }
        return s;
    }

    const RingPtr& ring() const { return ring_; }
    const VarTablePtr& vars() const { return vars_; }
    int trunc() const { return trunc_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    /// coefficient of an exact exponent vector
    Scalar coeff(const std::vector<int>& e) const
    {
        auto it = terms_.find(e);
        return it == terms_.end() ? Scalar::zero(ring_) : it->second;
    }

    Scalar constant_term() const { return coeff(std::vector<int>(vars_->size(), 0)); }

    /// lowest weighted degree among stored terms; trunc+1 when zero
    int min_degree() const
    {
        return terms_.empty() ? trunc_ + 1 : vars_->wdeg(terms_.begin()->first);
    }

    int max_degree() const
    {
        return terms_.empty() ? -1 : vars_->wdeg(terms_.rbegin()->first);
    }

    void set_coeff(std::vector<int> e, Scalar c)
    {
        if (e.size() != vars_->size())
            raise(errc::dimension_mismatch, "exponent length mismatch");
        if (vars_->wdeg(e) > trunc_)
            return;
        if (c.is_zero())
            terms_.erase(e);
        else
            terms_.insert_or_assign(std::move(e), std::move(c));
    }

    /// copy with a lower truncation, dropping higher terms
    TruncSeries truncated(int new_trunc) const
    {
        TruncSeries out(ring_, vars_, std::min(trunc_, new_trunc));
        for (const auto& [e, c] : terms_) {
            if (vars_->wdeg(e) > out.trunc_)
                break; // graded order: all further terms are higher
            out.terms_.emplace(e, c);
        }
        return out;
    }

    friend TruncSeries operator+(const TruncSeries& a, const TruncSeries& b)
    {
        check_compat(a, b);
        TruncSeries out = a.truncated(std::min(a.trunc_, b.trunc_));
        for (const auto& [e, c] : b.terms_) {
            if (b.vars_->wdeg(e) > out.trunc_)
                break;
            auto it = out.terms_.find(e);
            if (it == out.terms_.end())
                out.terms_.emplace(e, c);
            else {
                it->second = it->second + c;
                if (it->second.is_zero())
                    out.terms_.erase(it);
            }
        }
        return out;
    }

    friend TruncSeries operator-(const TruncSeries& a)
    {
        TruncSeries out(a.ring_, a.vars_, a.trunc_);
        for (const auto& [e, c] : a.terms_)
            out.terms_.emplace(e, -c);
        return out;
    }

    friend TruncSeries operator-(const TruncSeries& a, const TruncSeries& b)
    {
        return a + (-b);
    }

    friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b)
    {
        check_compat(a, b);
        TruncSeries out(a.ring_, a.vars_, std::min(a.trunc_, b.trunc_));
        std::vector<int> e(a.vars_->size());
        for (const auto& [ea, ca] : a.terms_) {
            int da = a.vars_->wdeg(ea);
            if (da > out.trunc_)
                break;
            for (const auto& [eb, cb] : b.terms_) {
                if (da + b.vars_->wdeg(eb) > out.trunc_)
                    break;
                for (size_t i = 0; i < e.size(); ++i)
                    e[i] = ea[i] + eb[i];
                Scalar prod = ca * cb;
                if (prod.is_zero())
                    continue;
                auto it = out.terms_.find(e);
                if (it == out.terms_.end())
                    out.terms_.emplace(e, std::move(prod));
                else {
                    it->second = it->second + prod;
                    if (it->second.is_zero())
                        out.terms_.erase(it);
                }
            }
        }
        return out;
    }

    friend TruncSeries operator*(const Scalar& c, const TruncSeries& a)
    {
        if (!same_ring(c.ring(), a.ring_))
            raise(errc::ring_mismatch, "scalar multiply across rings");
        TruncSeries out(a.ring_, a.vars_, a.trunc_);
        for (const auto& [e, v] : a.terms_) {
            Scalar prod = c * v;
            if (!prod.is_zero())
                out.terms_.emplace(e, std::move(prod));
        }
        return out;
    }

    friend bool operator==(const TruncSeries& a, const TruncSeries& b)
    {
        return same_ring(a.ring_, b.ring_) && *a.vars_ == *b.vars_ && a.trunc_ == b.trunc_ &&
               a.terms_ == b.terms_;
    }

    friend bool operator!=(const TruncSeries& a, const TruncSeries& b) { return !(a == b); }

    /// equality of the parts both sides can see
    friend bool equal_to_trunc(const TruncSeries& a, const TruncSeries& b)
    {
        int t = std::min(a.trunc_, b.trunc_);
        return a.truncated(t).terms_ == b.truncated(t).terms_;
    }

    TruncSeries pow(long n) const
    {
        if (n < 0)
            raise(errc::invalid_argument, "negative series power");
        TruncSeries r = one(ring_, vars_, trunc_);
        TruncSeries base = *this;
        while (n > 0) {
            if (n & 1)
                r = r * base;
            if (n >>= 1)
                base = base * base;
        }
        return r;
    }

    /// drop scalar-polynomial monomials above the given weight in every
    /// coefficient (grading-safe truncation of graded scalar rings)
    TruncSeries scalar_trimmed(int cap) const
    {
        if (cap < 0)
            return *this;
        TruncSeries out(ring_, vars_, trunc_);
        for (const auto& [e, c] : terms_) {
            Scalar t = trim_scalar_weight(c, cap);
            if (!t.is_zero())
                out.terms_.emplace(e, std::move(t));
        }
        return out;
    }

    /// apply f to every coefficient (e.g. a ring hom); drops zero images
    TruncSeries map_scalars(const RingPtr& new_ring,
                            const std::function<Scalar(const Scalar&)>& f) const
    {
        TruncSeries out(new_ring, vars_, trunc_);
        for (const auto& [e, c] : terms_) {
            Scalar img = f(c);
            if (!img.is_zero())
                out.terms_.emplace(e, std::move(img));
        }
        return out;
    }

    /// move this series into a superset variable table (same weights)
    TruncSeries with_vars(const VarTablePtr& nv) const
    {
        std::vector<int> remap(vars_->size());
        for (size_t i = 0; i < vars_->size(); ++i) {
            int j = nv->index(vars_->names[i]);
            if (j < 0 || nv->weights[j] != vars_->weights[i])
                raise(errc::var_mismatch, "variable " + vars_->names[i] + " missing in target");
            remap[i] = j;
        }
        TruncSeries out(ring_, nv, trunc_);
        for (const auto& [e, c] : terms_) {
            std::vector<int> ne(nv->size(), 0);
            for (size_t i = 0; i < e.size(); ++i)
                ne[remap[i]] = e[i];
            out.terms_.emplace(std::move(ne), c);
        }
        return out;
    }

    /// coefficient of name^k as a series in the remaining variables (the
    /// extracted variable's exponent is zeroed, table unchanged)
    TruncSeries coefficient_of(const std::string& name, int k) const
    {
        int i = vars_->index(name);
        if (i < 0)
            raise(errc::var_mismatch, "unknown variable " + name);
        TruncSeries out(ring_, vars_, trunc_);
        for (const auto& [e, c] : terms_) {
            if (e[i] != k)
                continue;
            std::vector<int> ne = e;
            ne[i] = 0;
            out.terms_.emplace(std::move(ne), c);
        }
        return out;
    }

    int max_exponent_of(const std::string& name) const
    {
        int i = vars_->index(name);
        int m = 0;
        for (const auto& [e, c] : terms_)
            m = std::max(m, e[i]);
        return m;
    }

    /// enforce upper bounds per variable (z_i^{n_i+1} = 0 relations)
    TruncSeries bounded(const std::map<std::string, int>& bounds) const
    {
        std::vector<int> bound(vars_->size(), -1);
        for (const auto& [name, b] : bounds) {
            int i = vars_->index(name);
            if (i >= 0)
                bound[i] = b;
        }
        TruncSeries out(ring_, vars_, trunc_);
        for (const auto& [e, c] : terms_) {
            bool keep = true;
            for (size_t i = 0; i < e.size(); ++i)
                if (bound[i] >= 0 && e[i] > bound[i]) {
                    keep = false;
                    break;
                }
            if (keep)
                out.terms_.emplace(e, c);
        }
        return out;
    }

    std::string str() const
    {
        if (terms_.empty())
            return "0";
        std::string s;
        for (const auto& [e, c] : terms_) {
            if (!s.empty())
                s += " + ";
            s += "(" + c.str() + ")";
            for (size_t i = 0; i < e.size(); ++i)
                if (e[i] != 0) {
                    s += "*" + vars_->names[i];
                    if (e[i] != 1)
                        s += "^" + std::to_string(e[i]);
                }
        }
        return s;
    }

private:
    static void check_compat(const TruncSeries& a, const TruncSeries& b)
    {
        if (!same_ring(a.ring_, b.ring_))
            raise(errc::ring_mismatch, "series over different rings");
        if (!(*a.vars_ == *b.vars_))
            raise(errc::var_mismatch, "series over different variable tables");
    }

    RingPtr ring_;
    VarTablePtr vars_;
    int trunc_;
    TermMap terms_;
};

/// Simultaneous substitution of series for variables. Every bound variable's
/// image must have zero constant term; unbound variables map to themselves in
/// the result table. The result truncation is the minimum of all inputs.
inline TruncSeries substitute(const TruncSeries& f,
                              const std::map<std::string, TruncSeries>& bindings)
{
    if (bindings.empty())
        return f;
    const TruncSeries& model = bindings.begin()->second;
    RingPtr ring = model.ring();
    VarTablePtr out_vars = model.vars();
    int trunc = std::min(f.trunc(), model.trunc());
    for (const auto& [name, g] : bindings) {
        if (!same_ring(g.ring(), ring) || !(*g.vars() == *out_vars))
            raise(errc::var_mismatch, "inconsistent substitution targets");
        if (!g.constant_term().is_zero())
            raise(errc::non_nilpotent_substitution,
                  "image of " + name + " has a constant term");
        trunc = std::min(trunc, g.trunc());
        if (f.vars()->index(name) < 0)
            raise(errc::var_mismatch, "binding for unknown variable " + name);
    }
    if (!same_ring(f.ring(), ring))
        raise(errc::ring_mismatch, "substitute: coefficient rings differ");

    // images per source variable
    std::vector<const TruncSeries*> image(f.vars()->size(), nullptr);
    std::vector<TruncSeries> identity_pool;
    identity_pool.reserve(f.vars()->size());
    for (size_t i = 0; i < f.vars()->size(); ++i) {
        auto it = bindings.find(f.vars()->names[i]);
        if (it != bindings.end()) {
            image[i] = &it->second;
        } else {
            identity_pool.push_back(
                TruncSeries::var(ring, out_vars, trunc, f.vars()->names[i]));
            image[i] = &identity_pool.back();
        }
    }

    // cache powers per variable
    std::vector<std::map<int, TruncSeries>> pow_cache(f.vars()->size());
    auto power = [&](size_t i, int k) -> const TruncSeries& {
        auto it = pow_cache[i].find(k);
        if (it != pow_cache[i].end())
            return it->second;
        TruncSeries p = image[i]->truncated(trunc).pow(k);
        return pow_cache[i].emplace(k, std::move(p)).first->second;
    };

    TruncSeries acc(ring, out_vars, trunc);
    for (const auto& [e, c] : f.terms()) {
        TruncSeries term = TruncSeries::constant(ring, out_vars, trunc, c);
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] != 0)
                term = term * power(i, e[i]);
        acc = acc + term;
    }
    return acc;
}

/// Inverse of a series whose constant term is invertible: geometric series in
/// the positive-degree part.
inline TruncSeries invert_unit(const TruncSeries& u)
{
    Scalar c0 = u.constant_term();
    if (c0.is_zero())
        raise(errc::not_invertible, "constant term is zero");
    Scalar c0inv = exact_div(Scalar::one(u.ring()), c0); // throws if not a unit
    TruncSeries n = u - TruncSeries::constant(u.ring(), u.vars(), u.trunc(), c0);
    TruncSeries w = (-c0inv) * n; // so u = c0 (1 - w)
    TruncSeries out = TruncSeries::one(u.ring(), u.vars(), u.trunc());
    TruncSeries wp = w;
    while (!wp.is_zero()) {
        out = out + wp;
        wp = wp * w;
    }
    return c0inv * out;
}

/// Composition inverse of gamma = b0 x + ... in the single variable `name`;
/// requires b0 invertible. Returns delta with gamma(delta(x)) = x to trunc.
inline TruncSeries reversion(const TruncSeries& gamma, const std::string& name = "x")
{
    int xi = gamma.vars()->index(name);
    if (xi < 0)
        raise(errc::var_mismatch, "reversion variable " + name + " absent");
    for (const auto& [e, c] : gamma.terms())
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] != 0 && static_cast<int>(i) != xi)
                raise(errc::var_mismatch, "reversion input not univariate in " + name);
    std::vector<int> e1(gamma.vars()->size(), 0);
    e1[xi] = 1;
    Scalar b0 = gamma.coeff(e1);
    if (!gamma.constant_term().is_zero())
        raise(errc::non_nilpotent_substitution, "reversion input has a constant term");
    Scalar b0inv;
    try {
        b0inv = exact_div(Scalar::one(gamma.ring()), b0);
    } catch (const error&) {
        raise(errc::non_invertible_leading_coefficient,
              "leading coefficient " + b0.str() + " is not invertible");
    }

    const int trunc = gamma.trunc();
    TruncSeries delta = b0inv * TruncSeries::var(gamma.ring(), gamma.vars(), trunc, name);
    const int w = gamma.vars()->weights[xi];
    for (int deg = 2 * w; deg <= trunc; deg += w) {
        TruncSeries err = substitute(gamma, {{name, delta}}) -
                          TruncSeries::var(gamma.ring(), gamma.vars(), trunc, name);
        TruncSeries fix(gamma.ring(), gamma.vars(), trunc);
        bool any = false;
        for (const auto& [e, c] : err.terms()) {
            if (gamma.vars()->wdeg(e) != deg)
                continue;
            fix.set_coeff(e, -(b0inv * c));
            any = true;
        }
        if (any)
            delta = delta + fix;
    }
    return delta;
}

} // namespace fglab
