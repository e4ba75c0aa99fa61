#pragma once

#include <stdexcept>
#include <string>

namespace landchange {

// Bad parameters or violated preconditions supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Unreadable, unwritable or missing files.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A file was read but its content does not follow the expected layout/schema.
class FormatError : public IoError {
 public:
  explicit FormatError(const std::string& what) : IoError(what) {}
};

// An internal consistency check failed.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace landchange
