#pragma once

#include <stdexcept>
#include <string>

namespace conewave {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidLattice : public Error {
 public:
  using Error::Error;
};

/// Margin queried on a wave that carries no red/blue color.
class MarginUndefined : public Error {
 public:
  using Error::Error;
};

/// A requested margin leaves no room for Fourier support on the lattice.
class InfeasibleMargin : public Error {
 public:
  using Error::Error;
};

/// A frequency sector is narrower than the lattice can resolve.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class InvalidFamily : public Error {
 public:
  using Error::Error;
};

/// The extractor pairing was not positive, so no mass can be removed.
class NoDecrement : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace conewave
