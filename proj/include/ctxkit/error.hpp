#ifndef CTXKIT_ERROR_HPP
#define CTXKIT_ERROR_HPP

#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ctxkit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario: unknown or uncovered variables, bad contexts, bad section data.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

/// A presheaf-level contract violation (subpresheaf law, degenerate bundle, mismatched scenarios).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A formula or theory outside what an operation accepts (sort errors, fragment violations).
class LogicError : public Error {
 public:
  using Error::Error;
};

/// Syntax error in formula or scenario text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        message_(message) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

/// A context product (or global product) exceeds the configured cell limit.
class ResourceError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::size_t initial_product_limit() {
  if (const char* env = std::getenv("CTXKIT_MAX_PRODUCT")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::size_t{1} << 20;
}

}  // namespace detail

/// Maximum number of cells allowed in any enumerated product. Defaults to 2^20,
/// overridable through CTXKIT_MAX_PRODUCT or by assigning to the reference.
inline std::size_t& product_limit() {
  static std::size_t limit = detail::initial_product_limit();
  return limit;
}

}  // namespace ctxkit

#endif  // CTXKIT_ERROR_HPP
