#pragma once

#include <stdexcept>
#include <string>

namespace pnml {

/// Caller handed us something outside the documented domain (bad shape,
/// non-finite value, out-of-range parameter).
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical routine (eigensolver) did not converge.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

/// A file could not be read or did not match its declared format. The
/// message carries a line number (text) or byte offset (binary).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pnml
