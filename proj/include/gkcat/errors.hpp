#pragma once

#include <stdexcept>
#include <string>

namespace gkcat {

/// Evaluation at a point where the defining expressions are singular
/// (branch points, punctures, poles of the rational data).
struct SingularEvaluation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Path integration failed: step underflow near a singularity, the
/// determinant drift ceiling was exceeded, or the continued root jumped
/// to a different branch.
struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Monodromy extraction failed.
struct ClosingError : std::runtime_error {
    enum class Kind {
        MalformedForm,          // matrix does not have the expected shape
        DegenerateDenominator,  // r2-r1 or r4-r3 vanishes, h undefined
    };
    Kind kind;
    ClosingError(Kind kind_, const std::string& what_)
        : std::runtime_error(what_), kind(kind_) {}
};

/// Root search failed (no sign change, pole crossing, excluded h).
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gkcat
