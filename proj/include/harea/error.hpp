#pragma once

#include <stdexcept>
#include <string>

namespace harea {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rasterization produced no interior cell.
class DomainUnresolved : public Error {
 public:
  using Error::Error;
};

/// Malformed domain, grid, datum or field input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A certificate field exceeds the unit ball somewhere.
class InadmissibleCertificate : public Error {
 public:
  using Error::Error;
};

/// The primal-dual iteration produced a non-finite value.
class Divergence : public Error {
 public:
  Divergence(const std::string& what, int iteration) : Error(what), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

class UnderdeterminedBoundary : public Error {
 public:
  using Error::Error;
};

/// No slope bound below the cap certifies the datum; carries the failing boundary sample.
class BscViolated : public Error {
 public:
  BscViolated(const std::string& what, int witness, bool upper_side)
      : Error(what), witness_(witness), upper_side_(upper_side) {}
  int witness() const noexcept { return witness_; }
  bool upper_side() const noexcept { return upper_side_; }

 private:
  int witness_;
  bool upper_side_;
};

/// Configuration or file-format error; maps to CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace harea
