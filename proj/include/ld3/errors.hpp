#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ld3 {

/// Caller passed data that violates an operation's preconditions
/// (wrong vector length, mismatched label sets, ...).
class input_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed dataset text. Carries the 1-based line number.
class parse_error : public std::runtime_error {
  public:
    parse_error(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// File could not be opened, read, or written.
class io_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid hyperparameters or stream specification.
class config_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Request outside what an embedded table or method supports.
class unsupported_error : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

}  // namespace ld3
