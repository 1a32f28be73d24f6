#pragma once

#include <stdexcept>
#include <string>

namespace tframe {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or unsupported image files.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

/// A tiling request that cannot produce valid tiles (zero-size rows/columns).
class TilingError : public Error {
 public:
  explicit TilingError(const std::string& msg) : Error(msg) {}
};

/// Wire-format violations: bad framing, truncation, duplicate results.
class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& msg) : Error(msg) {}
};

/// Transport-level failures (connection loss, handshake mismatch).
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& msg) : Error(msg) {}
};

}  // namespace tframe
