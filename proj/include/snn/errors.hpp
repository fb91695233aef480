#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace snn {

// Argument outside an operation's domain (bad dt, pixel level, rate, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Array shapes that do not agree (weights vs network, checkpoint vs engine).
class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/inf produced by the simulation or by a weight update.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file contents. `offset` is the byte position the parser was at.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Drawing with no ink after binarization.
class BlankDrawing : public std::runtime_error {
 public:
  BlankDrawing() : std::runtime_error("blank drawing: no ink above threshold") {}
};

}  // namespace snn
