#ifndef COOPRADAR_ERRORS_HPP
#define COOPRADAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coopradar {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input failed a precondition or schema constraint (CLI exit code 2).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A numeric routine could not produce a trustworthy result (CLI exit code 3).
class NumericError : public Error {
public:
    using Error::Error;
};

// geometry
struct ZeroVector : ValidationError { using ValidationError::ValidationError; };
struct NoIntersection : ValidationError { using ValidationError::ValidationError; };
struct DegenerateGeometry : ValidationError { using ValidationError::ValidationError; };
struct AssumptionViolated : ValidationError { using ValidationError::ValidationError; };
struct NoVisibility : ValidationError { using ValidationError::ValidationError; };

// array
struct PhaseAmbiguity : ValidationError { using ValidationError::ValidationError; };
struct IndexOutOfRange : ValidationError { using ValidationError::ValidationError; };
struct EmptyDirections : ValidationError { using ValidationError::ValidationError; };
struct DimensionMismatch : ValidationError { using ValidationError::ValidationError; };

// beamforming
struct SingularSystem : NumericError { using NumericError::NumericError; };
struct NonFinite : NumericError { using NumericError::NumericError; };
struct AllZeroResponse : NumericError { using NumericError::NumericError; };
struct InsufficientCoverage : ValidationError { using ValidationError::ValidationError; };

// detection
struct QuadratureFailure : NumericError { using NumericError::NumericError; };

// config
struct ParseError : ValidationError { using ValidationError::ValidationError; };

} // namespace coopradar

#endif
