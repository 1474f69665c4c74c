#pragma once

#include <stdexcept>
#include <string>

namespace helmex {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input data (trace lines, tree files, lexicon files).
struct ParseError : Error {
  using Error::Error;
};

/// Feature schema of the input does not match the schema a model was
/// trained with. Traversal and prediction refuse to proceed.
struct SchemaMismatchError : Error {
  using Error::Error;
};

/// Invalid configuration: scenario files, fit parameters, CLI usage.
struct ConfigError : Error {
  using Error::Error;
};

/// Lexicon missing an entry required to realize a concept set.
struct LexiconError : Error {
  using Error::Error;
};

}  // namespace helmex
