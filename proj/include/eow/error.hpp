#ifndef EOW_ERROR_HPP
#define EOW_ERROR_HPP

#include <stdexcept>
#include <string>

namespace eow {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: problem files, polynomial literals, scalar strings.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// An operation's precondition does not hold for the supplied data.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Variable lists of the operands do not line up.
class VariableMismatch : public PreconditionError {
 public:
  VariableMismatch(const std::string& what, std::string variable)
      : PreconditionError(what), variable_(std::move(variable)) {}
  const std::string& variable() const noexcept { return variable_; }

 private:
  std::string variable_;
};

/// A linear part that must be invertible is not.
class SingularLinearPart : public PreconditionError {
 public:
  SingularLinearPart(const std::string& what, std::string determinant)
      : PreconditionError(what), determinant_(std::move(determinant)) {}
  const std::string& determinant() const noexcept { return determinant_; }

 private:
  std::string determinant_;
};

/// Iterative numerical routine failed to converge.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::string trace = {})
      : Error(what), trace_(std::move(trace)) {}
  const std::string& trace() const noexcept { return trace_; }

 private:
  std::string trace_;
};

/// A sampled certificate or audit found a violation.
class CertificateError : public Error {
 public:
  using Error::Error;
};

}  // namespace eow

#endif  // EOW_ERROR_HPP
