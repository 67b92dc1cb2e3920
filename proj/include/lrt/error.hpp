#pragma once

#include <stdexcept>
#include <string>

namespace lrt {

// Base class for every domain failure raised by the library. The CLI maps
// these to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (JSON, CSV, LLM output). `location` is a human
// readable position such as "line 12" or "documents[1].requirements[0].id".
class ParseError : public Error {
 public:
  ParseError(const std::string& location, const std::string& what)
      : Error(location.empty() ? what : location + ": " + what), location_(location) {}
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

// A structurally valid input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Dangling reference between corpus parts; `id` names the offending identifier.
class ReferenceError : public ValidationError {
 public:
  ReferenceError(const std::string& id, const std::string& what)
      : ValidationError(what), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Zero-norm or otherwise unusable vector.
class DegenerateVectorError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Network failure, timeout, or exhausted retries.
class TransportError : public Error {
 public:
  using Error::Error;
};

class AuthError : public TransportError {
 public:
  using TransportError::TransportError;
};

// Well-formed transport but unexpected response body.
class ResponseError : public Error {
 public:
  using Error::Error;
};

}  // namespace lrt
