#pragma once

#include <stdexcept>
#include <string>

namespace hubble {

// Validation errors are caller mistakes (bad arguments, grids, configs).
// Numerical errors mean a valid request could not be computed reliably.
// The CLI maps them to exit codes 2 and 1.
enum class ErrorKind { validation, numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define HUBBLE_ERROR(Name, Kind)                                              \
  class Name : public Error {                                                 \
   public:                                                                    \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {}  \
  };

HUBBLE_ERROR(DomainError, validation)
HUBBLE_ERROR(PoleError, validation)
HUBBLE_ERROR(IntegerOrderError, validation)
HUBBLE_ERROR(SectorMismatch, validation)
HUBBLE_ERROR(GridError, validation)
HUBBLE_ERROR(ConfigError, validation)
HUBBLE_ERROR(ResourceError, validation)
HUBBLE_ERROR(NonConvergence, numerical)
HUBBLE_ERROR(SectorGap, numerical)
HUBBLE_ERROR(SingularSystem, numerical)
HUBBLE_ERROR(QuadratureError, numerical)

#undef HUBBLE_ERROR

}  // namespace hubble
