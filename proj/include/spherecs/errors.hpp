#pragma once

#include <stdexcept>
#include <string>

namespace spherecs {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A deformation function (or its reciprocal) hits a zero.
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

/// The coupling design linear system has no usable solution.
class InfeasibleDesign : public std::runtime_error {
public:
    InfeasibleDesign(const std::string& what, double condition)
        : std::runtime_error(what), condition_(condition) {}

    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// Population reached the top of the truncated Fock space.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, int suggested_dim)
        : std::runtime_error(what), suggested_dim_(suggested_dim) {}

    int suggested_dim() const noexcept { return suggested_dim_; }

private:
    int suggested_dim_;
};

/// A phase-space grid is too coarse or too small for the requested accuracy.
class ResolutionError : public std::runtime_error {
public:
    ResolutionError(const std::string& what, int suggested_nx, int suggested_np)
        : std::runtime_error(what), suggested_nx_(suggested_nx), suggested_np_(suggested_np) {}

    int suggested_nx() const noexcept { return suggested_nx_; }
    int suggested_np() const noexcept { return suggested_np_; }

private:
    int suggested_nx_;
    int suggested_np_;
};

}  // namespace spherecs
