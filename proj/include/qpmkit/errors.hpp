#pragma once

#include <stdexcept>
#include <string>

namespace qpmkit {

// Input outside the domain a model or operation is defined on
// (wavelength outside the validity window, non-physical triple, bad bracket).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// The model data itself is inconsistent (negative Sellmeier radicand,
// malformed crystal profile, degenerate grating).
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Least-squares fit cannot be formed from the supplied points.
class FitError : public std::runtime_error {
public:
    explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qpmkit
