#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace twinbeam {

// A value outside the domain its type or operation accepts.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The carrier phase reference of the rotation coefficients is undefined:
// |r(detuning)| or |t(detuning)| vanishes.
class SingularPoint : public std::domain_error {
public:
    SingularPoint(const std::string& what, double detuning_mhz)
        : std::domain_error(what), detuning_mhz_(detuning_mhz) {}

    [[nodiscard]] double detuning_mhz() const noexcept { return detuning_mhz_; }

private:
    double detuning_mhz_;
};

// Inputs that are well formed but describe an impossible physical state,
// e.g. a loss correction that would produce a non-positive variance.
class UnphysicalInput : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Iterative numerics that did not produce a usable answer.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Config file or override problem; carries the offending field and line.
class ConfigError : public InvalidInput {
public:
    ConfigError(const std::string& what, std::string field, std::size_t line = 0)
        : InvalidInput(what), field_(std::move(field)), line_(line) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }
    // 1-based; 0 when the field came from the command line or is missing.
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::string field_;
    std::size_t line_;
};

// Malformed dataset file; row is the 1-based line number in the file.
class DataFormatError : public InvalidInput {
public:
    DataFormatError(const std::string& what, std::size_t row)
        : InvalidInput(what), row_(row) {}

    [[nodiscard]] std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

}  // namespace twinbeam
