#pragma once

#include <stdexcept>
#include <string>

namespace hetcache {

/// Argument outside the mathematical domain of a closed form.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Vector/matrix shapes do not agree.
class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A type invariant was violated at construction time.
class InvariantError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Association is undefined for a file that no tier caches.
class FileUncached : public std::runtime_error {
public:
    explicit FileUncached(std::size_t file)
        : std::runtime_error("file " + std::to_string(file) + " is not cached in any tier"), file_(file) {}
    std::size_t file() const noexcept { return file_; }

private:
    std::size_t file_;
};

class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UniformBetaRequired : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The row identity sum_k p_mk z_k = g_m could not be met by the sequential fill.
class FillInfeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class KRequired2 : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration value rejected; field() is the dotted path of the offending entry.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace hetcache
