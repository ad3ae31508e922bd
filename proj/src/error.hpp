#pragma once

#include <stdexcept>
#include <string>

namespace bkmcmc {

// All library failures derive from Error so the C boundary can map them to
// status codes with a single catch ladder.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter outside the mathematical domain of a law or function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Mismatched vector lengths or grid sizes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid run or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Evaluation requested at a point where the quantity is infinite.
class SingularPointError : public Error {
 public:
  using Error::Error;
};

// NaN produced where a number was required (e.g. a potential evaluation).
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bkmcmc
