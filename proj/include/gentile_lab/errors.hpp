#pragma once

#include <stdexcept>
#include <string>

namespace gentile_lab {

/// Invalid argument for a mathematical operation (non-positive energy, s out of range, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Enumeration requested above the configured combinatorial cap.
class CapExceededError : public std::runtime_error {
public:
    explicit CapExceededError(const std::string& what) : std::runtime_error(what) {}
};

/// Exact counting requested beyond the dynamic-programming feasibility limit.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// Root finder or level-sum truncation failed; message carries diagnostics.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Root finder could not bracket the target.
class BracketError : public ConvergenceError {
public:
    explicit BracketError(const std::string& what) : ConvergenceError(what) {}
};

namespace detail {

template <class Error = DomainError>
inline void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw Error(message);
    }
}

} // namespace detail
} // namespace gentile_lab
