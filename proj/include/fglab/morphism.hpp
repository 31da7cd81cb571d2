#pragma once

#include "fglab/fgl.hpp"

namespace fglab {

/// How the coefficient-ring map phi of a morphism is presented.
///   Identity        canonical coercion source ring -> target ring
///   GeneratorImages images of the source Poly generators
///   LazardShifted   source is the universal law; phi(a_{i,j}) is the (i,j)
///                   coefficient of the shifted law F_target^gamma
enum class PhiKind { Identity, GeneratorImages, LazardShifted };

/// A morphism of formal group laws (phi, gamma): (A, F_A) -> (B, F_B) with
/// the defining identity phi(F_A)(gamma(u), gamma(v)) = gamma(F_B(u, v)).
struct FglMorphism {
    FormalGroupLaw source;
    FormalGroupLaw target;
    PhiKind phi_kind = PhiKind::Identity;
    std::map<std::string, Scalar> phi_images; // GeneratorImages only
    TruncSeries gamma;                        // univariate in x over target.ring

    static FglMorphism identity(const FormalGroupLaw& law)
    {
        FglMorphism m;
        m.source = m.target = law;
        m.phi_kind = PhiKind::Identity;
        m.gamma = TruncSeries::var(law.ring, VarTable::make({"x"}), law.trunc, "x");
        return m;
    }

    /// Adams morphism (id, [k] x) of a single law
    static FglMorphism adams(const FormalGroupLaw& law, long k)
    {
        FglMorphism m;
        m.source = m.target = law;
        m.phi_kind = PhiKind::Identity;
        m.gamma = n_series(law, k);
        return m;
    }

    Scalar b0() const
    {
        std::vector<int> e1(gamma.vars()->size(), 0);
        e1[gamma.vars()->index("x")] = 1;
        return gamma.coeff(e1);
    }
};

/// Apply phi to a source-ring scalar. LazardShifted morphisms need the
/// Lazard context; see apply_phi in lazard.hpp.
inline Scalar morphism_phi_scalar(const FglMorphism& m, const Scalar& s)
{
    switch (m.phi_kind) {
        case PhiKind::Identity: return convert(s, m.target.ring);
        case PhiKind::GeneratorImages: return subst_gens(s, m.phi_images, m.target.ring);
        case PhiKind::LazardShifted:
            raise(errc::invalid_argument,
                  "LazardShifted morphisms are applied through a LazardCtx");
    }
    raise(errc::invalid_argument, "bad phi kind");
}

/// phi applied to the whole source law, as a series over the target ring.
inline TruncSeries morphism_phi_law(const FglMorphism& m)
{
    if (m.phi_kind == PhiKind::LazardShifted) {
        // by definition phi(F_src) is the shifted target law
        return reparametrize(m.target, m.gamma).F;
    }
    return m.source.F.map_scalars(m.target.ring,
                                  [&](const Scalar& c) { return morphism_phi_scalar(m, c); });
}

struct MorphismCheck {
    bool ok = true;
    std::vector<int> monomial; // first failing (x,y) exponent, graded-lex
    Scalar defect;

    explicit operator bool() const { return ok; }
};

/// Verify phi(F_src)(gamma(u), gamma(v)) = gamma(F_tgt(u, v)) to truncation.
inline MorphismCheck morphism_check(const FglMorphism& m)
{
    const RingPtr& B = m.target.ring;
    const int N = std::min({m.source.trunc, m.target.trunc, m.gamma.trunc()});
    auto xy = FormalGroupLaw::xy_table();
    TruncSeries x = TruncSeries::var(B, xy, N, "x");
    TruncSeries y = TruncSeries::var(B, xy, N, "y");
    TruncSeries gx = substitute(m.gamma, {{"x", x}});
    TruncSeries gy = substitute(m.gamma, {{"x", y}});
    TruncSeries phiF = morphism_phi_law(m).truncated(N);
    TruncSeries lhs = substitute(phiF, {{"x", gx}, {"y", gy}});
    TruncSeries rhs = substitute(m.gamma.truncated(N), {{"x", formal_sum(m.target, x, y)}});
    TruncSeries diff = lhs - rhs;
    MorphismCheck c;
    if (!diff.is_zero()) {
        c.ok = false;
        auto it = diff.terms().begin();
        c.monomial = it->first;
        c.defect = it->second;
    }
    return c;
}

/// (phi_H, gamma_H) after (phi_G, gamma_G): composite morphism H o G with
/// gamma(x) = phi_H(gamma_G)(gamma_H(x)).
inline FglMorphism compose_morphisms(const FglMorphism& h, const FglMorphism& g)
{
    if (!same_ring(g.target.ring, h.source.ring) || !equal_to_trunc(g.target.F, h.source.F))
        raise(errc::incompatible_morphisms, "target of g is not the source of h");
    if (h.phi_kind == PhiKind::LazardShifted)
        raise(errc::incompatible_morphisms,
              "composition through a Lazard-shifted phi needs a LazardCtx");
    FglMorphism out;
    out.source = g.source;
    out.target = h.target;

    // phi_H o phi_G
    if (g.phi_kind == PhiKind::Identity) {
        out.phi_kind = h.phi_kind;
        out.phi_images = h.phi_images;
    } else if (g.phi_kind == PhiKind::GeneratorImages) {
        out.phi_kind = PhiKind::GeneratorImages;
        for (const auto& [name, img] : g.phi_images)
            out.phi_images.emplace(name, morphism_phi_scalar(h, img));
    } else {
        out.phi_kind = PhiKind::LazardShifted; // still a morphism out of the universal law
    }

    TruncSeries mapped = g.gamma.map_scalars(
        h.target.ring, [&](const Scalar& c) { return morphism_phi_scalar(h, c); });
    out.gamma = substitute(mapped, {{"x", h.gamma}});
    return out;
}

/// Sum of two morphisms with the same phi: gamma = phi(F_src)(beta(x), gamma(x)).
inline FglMorphism add_morphisms(const FglMorphism& g, const FglMorphism& h)
{
    if (!same_ring(g.source.ring, h.source.ring) || !same_ring(g.target.ring, h.target.ring) ||
        !equal_to_trunc(g.source.F, h.source.F) || !equal_to_trunc(g.target.F, h.target.F))
        raise(errc::incompatible_morphisms, "morphisms between different laws");
    if (g.phi_kind != h.phi_kind || g.phi_images != h.phi_images)
        raise(errc::incompatible_morphisms, "morphism addition needs equal phi");
    FglMorphism out = g;
    TruncSeries phiF = morphism_phi_law(g);
    TruncSeries gx = g.gamma;
    TruncSeries hx = substitute(h.gamma, {{"x", TruncSeries::var(h.target.ring,
                                                                 g.gamma.vars(),
                                                                 g.gamma.trunc(), "x")}});
    out.gamma = substitute(phiF, {{"x", gx}, {"y", hx}});
    return out;
}

/// A multiplicative operation is stable iff b0 = 1.
inline bool is_stable(const FglMorphism& m)
{
    return m.b0() == Scalar::one(m.target.ring);
}

} // namespace fglab
