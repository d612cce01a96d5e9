// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace stratum {

struct CycleError : std::runtime_error {
    explicit CycleError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateBoxError : std::runtime_error {
    explicit DegenerateBoxError(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatchError : std::runtime_error {
    explicit DimensionMismatchError(const std::string& what) : std::runtime_error(what) {}
};

struct RangeError : std::runtime_error {
    explicit RangeError(const std::string& what) : std::runtime_error(what) {}
};

struct IndexError : std::runtime_error {
    explicit IndexError(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyPromptError : std::runtime_error {
    explicit EmptyPromptError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input text (unparseable JSON and the like).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// One semantic problem in an input file, located by a field path
/// such as "objects[2].opacity".
struct Diagnostic {
    std::string path;
    std::string message;
};

/// Well-formed input that violates the scene contract. Carries every
/// violation found, not just the first.
struct ValidationError : std::runtime_error {
    std::vector<Diagnostic> diagnostics;

    ValidationError(const std::string& what, std::vector<Diagnostic> diags)
        : std::runtime_error(what), diagnostics(std::move(diags)) {}
    explicit ValidationError(const std::string& what)
        : std::runtime_error(what) {}
};

}  // namespace stratum
