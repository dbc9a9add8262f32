#pragma once

#include <stdexcept>
#include <string>

namespace fbem {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define FBEM_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

FBEM_DEFINE_ERROR(DomainError);
FBEM_DEFINE_ERROR(CapacityError);
FBEM_DEFINE_ERROR(EmptySpaceError);
FBEM_DEFINE_ERROR(SingularEvaluation);
FBEM_DEFINE_ERROR(SpaceKindError);
FBEM_DEFINE_ERROR(ConfigError);

#undef FBEM_DEFINE_ERROR

class QuadratureFailure : public Error {
 public:
  QuadratureFailure(const std::string& pair_case, double error_estimate)
      : Error("QuadratureFailure",
              "quadrature did not converge for " + pair_case + " pair (estimate " +
                  std::to_string(error_estimate) + ")"),
        pair_case_(pair_case),
        error_estimate_(error_estimate) {}
  const std::string& pair_case() const noexcept { return pair_case_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  std::string pair_case_;
  double error_estimate_;
};

class SingularMatrix : public Error {
 public:
  explicit SingularMatrix(double rcond)
      : Error("SingularMatrix",
              "Galerkin matrix is numerically singular (reciprocal condition estimate " +
                  std::to_string(rcond) + ")"),
        rcond_(rcond) {}
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

}  // namespace fbem
