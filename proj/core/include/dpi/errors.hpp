#pragma once

#include <stdexcept>
#include <string>

namespace dpi {

// Bad user input: malformed config, unknown keys, invalid CLI arguments.
// Mapped to process exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// API misuse by calling code (wrong shapes, stepping a finished episode, ...).
struct UsageError : std::logic_error {
  explicit UsageError(const std::string& what) : std::logic_error(what) {}
};

// Non-finite value detected during numeric work. Carries the site tag.
// Mapped to process exit code 3.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), site(where) {}
  std::string site;
};

}  // namespace dpi
