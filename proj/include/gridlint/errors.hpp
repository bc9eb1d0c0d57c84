#pragma once

#include <stdexcept>
#include <string>

namespace gridlint {

/// Base class for every error raised by the analyzer.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FileNotFound : public Error {
 public:
  explicit FileNotFound(const std::string& path) : Error("file not found: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Malformed workbook or annotation file. The message carries the field path.
class FormatError : public Error {
 public:
  using Error::Error;
};

class DuplicateCell : public Error {
 public:
  explicit DuplicateCell(const std::string& address)
      : Error("duplicate cell: " + address), address_(address) {}
  const std::string& address() const { return address_; }

 private:
  std::string address_;
};

class EmptySheet : public Error {
 public:
  explicit EmptySheet(const std::string& sheet) : Error("sheet has no cells: " + sheet) {}
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class RangeTooLarge : public Error {
 public:
  using Error::Error;
};

class NegativeCount : public Error {
 public:
  using Error::Error;
};

class InvalidSplit : public Error {
 public:
  using Error::Error;
};

class NonNegativeDelta : public Error {
 public:
  using Error::Error;
};

class PaletteExhausted : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class WriteError : public Error {
 public:
  using Error::Error;
};

}  // namespace gridlint
