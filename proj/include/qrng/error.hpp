#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qrng {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates an operation's precondition.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Reduction factor is infinite: the digitized signal cannot be trusted.
class UntrustedSource : public Error {
 public:
  using Error::Error;
};

/// Histogram does not show two separate maxima.
class UnimodalPdf : public Error {
 public:
  using Error::Error;
};

/// Measured B lies outside the domain covered by the lookup curve.
class OutOfModel : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries the 1-based line number when known (0 otherwise).
class DataFormatError : public Error {
 public:
  DataFormatError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Von Neumann output was too short to fill the requested seed.
class NeedsMoreEntropy : public Error {
 public:
  NeedsMoreEntropy(std::size_t deficit)
      : Error("insufficient debiased bits for seed, deficit " + std::to_string(deficit)),
        deficit_(deficit) {}
  std::size_t deficit() const noexcept { return deficit_; }

 private:
  std::size_t deficit_;
};

}  // namespace qrng
