#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace droplet_dft {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed or inconsistent user input (config keys, unit tags, data files).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A data file could not be parsed; carries the 1-based line number.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& what, std::size_t line)
        : ValidationError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// The self-consistent coupling has no root with renormalized eps_dd <= 1
/// (density below the critical density of the stability boundary).
class NoStableSolution : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative solver hit its iteration cap; keeps the residual history.
class IterationLimit : public std::runtime_error {
public:
    IterationLimit(const std::string& what, std::vector<double> residuals)
        : std::runtime_error(what), residuals_(std::move(residuals)) {}
    const std::vector<double>& residuals() const noexcept { return residuals_; }
    double last_residual() const noexcept { return residuals_.empty() ? 0.0 : residuals_.back(); }

private:
    std::vector<double> residuals_;
};

/// The droplet self-binding regime requires a12 < -a11.
class NoDroplet : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace droplet_dft
