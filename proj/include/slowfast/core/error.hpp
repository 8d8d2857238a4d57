#pragma once

#include <stdexcept>
#include <string>

namespace slowfast {

/// Malformed model or experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// An operation was called outside its domain (e.g. biased sampling with zero rate).
class PreconditionError : public std::logic_error {
 public:
  explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

/// A model broke one of its structural guarantees at run time (e.g. a fast
/// path left its component space).
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace slowfast
