#pragma once

#include <optional>
#include <vector>

#include "fglab/ring.hpp"

namespace fglab {

using IntRow = std::vector<Int>;
using IntMatrix = std::vector<IntRow>;
using RatRow = std::vector<Rat>;

/// A sublattice of Z^ambient_rank given by a row basis in Hermite normal
/// form: row echelon, positive pivots, entries above each pivot reduced into
/// [0, pivot). The HNF is the unique canonical basis of the row span.
struct IntegerLattice {
    int ambient_rank = 0;
    IntMatrix basis; // HNF rows, no zero rows
    int degree = 0;  // graded degree this lattice describes (bookkeeping)

    int rank() const { return static_cast<int>(basis.size()); }
};

namespace detail {

inline int pivot_col(const IntRow& row)
{
    for (size_t j = 0; j < row.size(); ++j)
        if (row[j] != 0)
            return static_cast<int>(j);
    return -1;
}

} // namespace detail

/// Row-style Hermite normal form with transformation matrix: returns (H, U)
/// with H = U * M, U unimodular. Zero rows of H are kept at the bottom (their
/// U-rows span the left kernel of M).
inline std::pair<IntMatrix, IntMatrix> hnf_with_transform(const IntMatrix& m_in)
{
    IntMatrix h = m_in;
    const size_t rows = h.size();
    const size_t cols = rows ? h[0].size() : 0;
    for (const auto& r : h)
        if (r.size() != cols)
            raise(errc::dimension_mismatch, "ragged matrix");

    IntMatrix u(rows, IntRow(rows, 0));
    for (size_t i = 0; i < rows; ++i)
        u[i][i] = 1;

    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        // eliminate column c below row r with extended gcd row operations
        for (size_t i = r + 1; i < rows; ++i) {
            if (h[i][c] == 0)
                continue;
            if (h[r][c] == 0) {
                std::swap(h[r], h[i]);
                std::swap(u[r], u[i]);
                continue;
            }
            Int g, s, t;
            mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), h[r][c].get_mpz_t(),
                       h[i][c].get_mpz_t());
            Int a = h[r][c] / g, b = h[i][c] / g;
            for (size_t j = 0; j < cols; ++j) {
                Int hr = h[r][j], hi = h[i][j];
                h[r][j] = s * hr + t * hi;
                h[i][j] = a * hi - b * hr;
            }
            for (size_t j = 0; j < rows; ++j) {
                Int ur = u[r][j], ui = u[i][j];
                u[r][j] = s * ur + t * ui;
                u[i][j] = a * ui - b * ur;
            }
        }
        if (h[r][c] != 0) {
            if (h[r][c] < 0) {
                for (auto& x : h[r])
                    x = -x;
                for (auto& x : u[r])
                    x = -x;
            }
            // reduce entries above the pivot into [0, pivot)
            for (size_t i = 0; i < r; ++i) {
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), h[i][c].get_mpz_t(), h[r][c].get_mpz_t());
                if (q != 0) {
                    for (size_t j = 0; j < cols; ++j)
                        h[i][j] -= q * h[r][j];
                    for (size_t j = 0; j < rows; ++j)
                        u[i][j] -= q * u[r][j];
                }
            }
            ++r;
        }
    }
    return {std::move(h), std::move(u)};
}

/// Hermite normal form of the row span of `m`.
inline IntegerLattice hnf(const IntMatrix& m, int degree = 0)
{
    auto [h, u] = hnf_with_transform(m);
    IntegerLattice lat;
    lat.ambient_rank = m.empty() ? 0 : static_cast<int>(m[0].size());
    lat.degree = degree;
    for (auto& row : h)
        if (detail::pivot_col(row) >= 0)
            lat.basis.push_back(std::move(row));
    return lat;
}

/// Solve x * basis = v over Q for an HNF row basis. Returns nullopt when v is
/// outside the rational row span.
inline std::optional<RatRow> solve_in_span(const IntMatrix& basis, const RatRow& v)
{
    const size_t cols = v.size();
    RatRow rem = v;
    RatRow coeff(basis.size(), Rat(0));
    for (size_t i = 0; i < basis.size(); ++i) {
        int pc = detail::pivot_col(basis[i]);
        if (pc < 0)
            continue;
        Rat c = rem[pc] / Rat(basis[i][pc]);
        coeff[i] = c;
        if (c != 0)
            for (size_t j = pc; j < cols; ++j)
                rem[j] -= c * Rat(basis[i][j]);
    }
    for (const auto& x : rem)
        if (x != 0)
            return std::nullopt;
    return coeff;
}

/// Membership of a rational vector in lat tensor Z[S^-1]: solve over Q and
/// demand every coordinate denominator be a product of primes dividing the
/// inverted set.
inline bool lattice_member(const RatRow& v, const IntegerLattice& lat,
                           const std::vector<Int>& inverted)
{
    if (static_cast<int>(v.size()) != lat.ambient_rank)
        raise(errc::dimension_mismatch, "vector length " + std::to_string(v.size()) +
                                            " vs ambient rank " +
                                            std::to_string(lat.ambient_rank));
    auto coeff = solve_in_span(lat.basis, v);
    if (!coeff)
        return false;
    for (const auto& c : *coeff) {
        if (c.get_den() == 1)
            continue;
        if (!is_smooth_over(c.get_den(), inverted))
            return false;
    }
    return true;
}

/// Canonical rational coordinates of v in the HNF basis (nullopt outside the
/// rational span).
inline std::optional<RatRow> lattice_coords(const RatRow& v, const IntegerLattice& lat)
{
    if (static_cast<int>(v.size()) != lat.ambient_rank)
        raise(errc::dimension_mismatch, "vector length mismatch");
    return solve_in_span(lat.basis, v);
}

} // namespace fglab
