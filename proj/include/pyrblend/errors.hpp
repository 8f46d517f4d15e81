#pragma once

#include <stdexcept>
#include <string>

namespace pyrblend {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidImage : public Error {
 public:
  using Error::Error;
};

class InvalidKernel : public Error {
 public:
  using Error::Error;
};

class TargetDimMismatch : public Error {
 public:
  using Error::Error;
};

class TooManyLevels : public Error {
 public:
  using Error::Error;
};

class DimMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidBlendSpec : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class EncodeError : public Error {
 public:
  using Error::Error;
};

class UnreadableRoot : public Error {
 public:
  using Error::Error;
};

class InsufficientPatients : public Error {
 public:
  using Error::Error;
};

class UnassignedPatient : public Error {
 public:
  using Error::Error;
};

class InvalidFold : public Error {
 public:
  using Error::Error;
};

class InconsistentIndex : public Error {
 public:
  using Error::Error;
};

}  // namespace pyrblend
