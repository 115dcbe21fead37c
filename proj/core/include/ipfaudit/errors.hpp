#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ipfaudit {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input bytes or text that cannot be decoded (bad pcap header, bad cell).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A CSV or manifest does not match the expected columns or fields.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Non-numeric or otherwise invalid cell; carries the zero-based data row.
class RowError : public FormatError {
 public:
  RowError(std::size_t row, const std::string& what)
      : FormatError("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// Caller violated an operation's precondition (single class, bad k, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace ipfaudit
