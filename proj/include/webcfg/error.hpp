#pragma once

#include <stdexcept>
#include <string>

namespace webcfg {

/// Raised for bad caller input: malformed files, off-grid configs, schema
/// mismatches, degenerate datasets. The CLI maps it to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Unreadable or unwritable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace webcfg
