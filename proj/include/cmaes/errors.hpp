#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmaes {

/// Base of every error the library throws on purpose. Anything else escaping
/// the public API is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied invalid input (bad dimension, wrong batch size, NaN value).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The distribution update produced non-finite parameters.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Snapshot bytes could not be decoded.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : Error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Snapshot was written by an incompatible format version.
class VersionError : public DecodeError {
 public:
  VersionError(unsigned found, unsigned supported, std::size_t offset)
      : DecodeError("snapshot format version " + std::to_string(found) +
                        " is not supported (this build reads version " + std::to_string(supported) +
                        ")",
                    offset),
        found_(found),
        supported_(supported) {}
  unsigned found() const noexcept { return found_; }
  unsigned supported() const noexcept { return supported_; }

 private:
  unsigned found_;
  unsigned supported_;
};

namespace detail {
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}
}  // namespace detail

}  // namespace cmaes
