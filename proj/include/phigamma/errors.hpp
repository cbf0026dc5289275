#pragma once

/* Error types shared across the toolkit. Every failure that a caller can
 * meaningfully react to gets its own type; plain std::invalid_argument is
 * reserved for programming errors (bad constructor arguments etc.). */

#include <stdexcept>
#include <string>

namespace phigamma {

// A value that is indistinguishable from zero at working precision was used
// as a divisor.
struct DivisionByZeroAtPrecision : std::runtime_error {
    explicit DivisionByZeroAtPrecision(const std::string& what)
        : std::runtime_error(what) {}
};

// A decision (valuation, hull vertex, rank) needs more p-adic digits than the
// value carries.
struct InsufficientPrecision : std::runtime_error {
    explicit InsufficientPrecision(const std::string& what)
        : std::runtime_error(what) {}
};

// Hensel lifting has no simple root at the given seed.
struct NoLift : std::runtime_error {
    explicit NoLift(const std::string& what) : std::runtime_error(what) {}
};

// Input outside the mathematical domain of the operation (log of a non-1-unit,
// exp outside the convergence disk, ...).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// An equality or zero test fell inside the guard-digit zone: the honest answer
// is "cannot tell at this precision".
struct AmbiguousAtPrecision : std::runtime_error {
    explicit AmbiguousAtPrecision(const std::string& what)
        : std::runtime_error(what) {}
};

// A series/window operation produced no fully determined output coefficient.
struct EmptyWindow : std::runtime_error {
    explicit EmptyWindow(const std::string& what) : std::runtime_error(what) {}
};

// A substitution or product needs coefficients outside the representable
// window.
struct WindowOverflow : std::runtime_error {
    explicit WindowOverflow(const std::string& what)
        : std::runtime_error(what) {}
};

// The integer approximation used for a unit exponent cannot reach the target
// precision within its iteration cap.
struct ApproximationNotConverged : std::runtime_error {
    explicit ApproximationNotConverged(const std::string& what)
        : std::runtime_error(what) {}
};

// A Neumann-type series failed to gain weight across the iteration cap
// (signals a violated convergence precondition).
struct NotConverging : std::runtime_error {
    explicit NotConverging(const std::string& what)
        : std::runtime_error(what) {}
};

// A dimension formula was asked for a parameter containing an exceptional
// character, where the formula does not apply.
struct ExceptionalParameter : std::runtime_error {
    explicit ExceptionalParameter(const std::string& what)
        : std::runtime_error(what) {}
};

// A pipeline stage received values whose certified precision is below what the
// stage needs.
struct PrecisionError : std::runtime_error {
    explicit PrecisionError(const std::string& what)
        : std::runtime_error(what) {}
};

// The refinement pipeline was asked for the supersingular construction on
// ordinary input.
struct NotSupersingular : std::runtime_error {
    explicit NotSupersingular(const std::string& what)
        : std::runtime_error(what) {}
};

// A reference-table lookup outside the tabulated index set.
struct OutOfTable : std::runtime_error {
    explicit OutOfTable(const std::string& what) : std::runtime_error(what) {}
};

// Malformed text input; carries line/field diagnostics in the message.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace phigamma
