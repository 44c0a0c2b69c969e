#pragma once

#include <stdexcept>
#include <string>

namespace cvqt {

/// Invalid argument values (bad transmittivity, negative rates, ...). CLI exit code 2.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input outside the operation's mathematical domain (non bona fide state, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Numerical failure with the achieved tolerance attached. CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved tolerance " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}
    double achieved() const { return achieved_; }

private:
    double achieved_ = 0.0;
};

/// Fock/series cutoffs too small for the requested operation. CLI exit code 3.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double deficit)
        : std::runtime_error(what + " (deficit " + std::to_string(deficit) + ")"), deficit_(deficit) {}
    double deficit() const { return deficit_; }

private:
    double deficit_ = 0.0;
};

}  // namespace cvqt
