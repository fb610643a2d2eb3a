#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace syncoord {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed molecule text. `offset()` is the byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Structurally invalid graph (self-loop, duplicate bond, bad index).
class GraphError : public Error {
 public:
  using Error::Error;
};

/// Non-fatal diagnostics collected while processing one molecule.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string msg) {
  if (sink != nullptr) sink->push_back(std::move(msg));
}

}  // namespace syncoord
