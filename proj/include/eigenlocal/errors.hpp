#pragma once

#include <stdexcept>
#include <string>

namespace eigenlocal {

/// Broad failure classes. The CLI maps them onto exit codes.
enum class ErrorKind {
    Validation,    // bad parameters, malformed input, contract violations
    MissingInput,  // required files absent
    Numerical,     // convergence, tracking, meshing failures
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define EIGENLOCAL_DEFINE_ERROR(Name, Kind)                                   \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
    };

EIGENLOCAL_DEFINE_ERROR(ParameterError, Validation)
EIGENLOCAL_DEFINE_ERROR(ValidationError, Validation)
EIGENLOCAL_DEFINE_ERROR(ContractError, Validation)
EIGENLOCAL_DEFINE_ERROR(ArityError, Validation)
EIGENLOCAL_DEFINE_ERROR(DomainError, Validation)
EIGENLOCAL_DEFINE_ERROR(InputError, Validation)
EIGENLOCAL_DEFINE_ERROR(ResolutionError, Validation)
EIGENLOCAL_DEFINE_ERROR(GeometryError, Numerical)
EIGENLOCAL_DEFINE_ERROR(ExtrapolationError, Numerical)
EIGENLOCAL_DEFINE_ERROR(SymmetryError, Numerical)
EIGENLOCAL_DEFINE_ERROR(ConvergenceError, Numerical)
EIGENLOCAL_DEFINE_ERROR(TrackingError, Numerical)
EIGENLOCAL_DEFINE_ERROR(MissingInputError, MissingInput)
EIGENLOCAL_DEFINE_ERROR(IoError, Io)

#undef EIGENLOCAL_DEFINE_ERROR

}  // namespace eigenlocal
