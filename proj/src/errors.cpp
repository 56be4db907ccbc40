#include "nbsel/errors.hpp"

namespace nbsel {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ConstantColumn: return "ConstantColumn";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::EmptyAllowedSet: return "EmptyAllowedSet";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::NotUnique: return "NotUnique";
    case ErrorKind::GridError: return "GridError";
    case ErrorKind::FoldTooSmall: return "FoldTooSmall";
    case ErrorKind::InconsistentP: return "InconsistentP";
    case ErrorKind::EmptyPath: return "EmptyPath";
    case ErrorKind::MleDoesNotExist: return "MleDoesNotExist";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::RaggedRow: return "RaggedRow";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DomainError:
    case ErrorKind::GridError:
    case ErrorKind::FoldTooSmall:
    case ErrorKind::ConfigError:
    case ErrorKind::EmptyAllowedSet:
      return 2;
    case ErrorKind::ConstantColumn:
    case ErrorKind::InconsistentP:
    case ErrorKind::EmptyPath:
    case ErrorKind::ParseError:
    case ErrorKind::RaggedRow:
    case ErrorKind::IoError:
      return 3;
    case ErrorKind::NotPositiveDefinite:
    case ErrorKind::MaxIterations:
    case ErrorKind::NotUnique:
    case ErrorKind::MleDoesNotExist:
      return 4;
  }
  return 4;
}

}  // namespace nbsel
