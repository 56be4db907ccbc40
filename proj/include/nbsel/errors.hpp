#ifndef NBSEL_ERRORS_HPP
#define NBSEL_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nbsel {

enum class ErrorKind {
  DomainError,
  ConstantColumn,
  NotPositiveDefinite,
  EmptyAllowedSet,
  MaxIterations,
  NotUnique,
  GridError,
  FoldTooSmall,
  InconsistentP,
  EmptyPath,
  MleDoesNotExist,
  ParseError,
  RaggedRow,
  IoError,
  ConfigError,
};

const char* to_string(ErrorKind kind);

// Every library failure is reported through this one exception type. `index`
// carries the offending column, pivot, line or sweep count when the kind has
// one, and -1 otherwise. `column` is only used by ParseError.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::int64_t index = -1,
        std::int64_t column = -1)
      : std::runtime_error(what), kind_(kind), index_(index), column_(column) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::int64_t index() const noexcept { return index_; }
  std::int64_t column() const noexcept { return column_; }

 private:
  ErrorKind kind_;
  std::int64_t index_;
  std::int64_t column_;
};

// CLI exit code contract: 2 config, 3 data, 4 numeric.
int exit_code_for(ErrorKind kind);

}  // namespace nbsel

#endif  // NBSEL_ERRORS_HPP
