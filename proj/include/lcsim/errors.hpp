// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace lcsim {

/// Base class for lcsim runtime failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; the message carries path and line context.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally readable input that violates a domain contract
/// (degenerate metric denominators, empty benchmarks, schema mismatches).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration: CLI arguments, grid files, generator specs.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace lcsim
