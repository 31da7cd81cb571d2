#pragma once

#include <stdexcept>
#include <string>

namespace fglab {

// Error taxonomy used across the library. The CLI maps these to exit codes;
// tests match on the code, not the message text.
enum class errc {
    ring_mismatch,
    inexact_division,
    dimension_mismatch,
    var_mismatch,
    non_nilpotent_substitution,
    non_invertible_leading_coefficient,
    not_invertible,
    incompatible_morphisms,
    zero_series,
    not_in_lattice,
    non_homogeneous,
    non_symmetric_result,
    bad_representatives,
    morphism_invalid,
    singular_system,
    unstabilized,
    bound_exceeded,
    index_out_of_range,
    invalid_argument,
};

inline const char* errc_name(errc c)
{
    switch (c) {
        case errc::ring_mismatch: return "RingMismatch";
        case errc::inexact_division: return "InexactDivision";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::var_mismatch: return "VarMismatch";
        case errc::non_nilpotent_substitution: return "NonNilpotentSubstitution";
        case errc::non_invertible_leading_coefficient: return "NonInvertibleLeadingCoefficient";
        case errc::not_invertible: return "NotInvertible";
        case errc::incompatible_morphisms: return "IncompatibleMorphisms";
        case errc::zero_series: return "ZeroSeries";
        case errc::not_in_lattice: return "NotInLattice";
        case errc::non_homogeneous: return "NonHomogeneous";
        case errc::non_symmetric_result: return "NonSymmetricResult";
        case errc::bad_representatives: return "BadRepresentatives";
        case errc::morphism_invalid: return "MorphismInvalid";
        case errc::singular_system: return "SingularSystem";
        case errc::unstabilized: return "Unstabilized";
        case errc::bound_exceeded: return "BoundExceeded";
        case errc::index_out_of_range: return "IndexOutOfRange";
        case errc::invalid_argument: return "InvalidArgument";
    }
    return "UnknownError";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code)
    {
    }

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what)
{
    throw error(code, what);
}

} // namespace fglab
