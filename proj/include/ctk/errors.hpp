#pragma once

#include <stdexcept>
#include <string>

namespace ctk {

// Base of every error the toolkit raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class WindowError : public Error {
 public:
  using Error::Error;
};

class ContractError : public Error {
 public:
  using Error::Error;
};

class MeasureError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

// Toeplitz leading minor too small: the measure is (numerically) finitely supported.
class FiniteSupportError : public Error {
 public:
  using Error::Error;
};

class BreakdownError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

class EnumerationGuard : public Error {
 public:
  using Error::Error;
};

class GcmError : public Error {
 public:
  using Error::Error;
};

// A leading principal minor vanished: outside the big cell.
class FactorizationBoundary : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctk
