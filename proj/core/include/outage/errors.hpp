#pragma once

#include <stdexcept>
#include <string>

namespace outage {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. The message carries the field path.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that breaks a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Inconsistent dimensions or an incoherent schedule handed to a pure function.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace outage
