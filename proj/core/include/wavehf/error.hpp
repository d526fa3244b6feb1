#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace wavehf {

/// Base of all library errors that are not plain precondition violations.
/// Precondition violations (bad grid sizes, grid mismatch) use std::invalid_argument.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed: Picard non-convergence, SCF non-convergence,
/// non-finite state. Carries the simulation time when one is meaningful.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what, std::optional<double> time = std::nullopt)
        : Error(what), time_(time) {}

    std::optional<double> time() const noexcept { return time_; }

private:
    std::optional<double> time_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace wavehf
