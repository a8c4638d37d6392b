#pragma once

#include <stdexcept>
#include <string>

namespace dynframe {

/// Base of every error raised by the library. Callers that only need to
/// distinguish "bad input" from "numerical trouble" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class NotAFrame : public Error {
 public:
  using Error::Error;
};

class NotCertified : public Error {
 public:
  using Error::Error;
};

class IndexMismatch : public Error {
 public:
  using Error::Error;
};

class DimMismatch : public Error {
 public:
  using Error::Error;
};

class CommutationViolated : public Error {
 public:
  using Error::Error;
};

/// Two independent numerical routes disagreed on a verdict. Raised instead
/// of silently picking one side.
class InconsistentVerdicts : public Error {
 public:
  using Error::Error;
};

class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace dynframe
