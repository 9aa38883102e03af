#pragma once

#include <stdexcept>
#include <string>

namespace lyapdim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A state or tangent entry became non-finite, or the trajectory left the
/// divergence guard radius.
class NonFiniteState : public Error {
public:
    explicit NonFiniteState(const std::string& what, double time = 0.0)
        : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class HorizonTooShort : public Error {
public:
    using Error::Error;
};

/// The fundamental-matrix bookkeeping would leave double range.
class OverflowRisk : public Error {
public:
    using Error::Error;
};

/// sigma*r + (sigma - b)(b - 1) <= 0, so the change-of-variables matrix S
/// does not exist.
class RhoUndefined : public Error {
public:
    using Error::Error;
};

/// Leading coefficient of the gamma_2 quadratic vanishes. `feasible()` tells
/// whether the remaining linear inequality admits every gamma_2 > 0.
class DegenerateQuadratic : public Error {
public:
    DegenerateQuadratic(const std::string& what, bool feasible)
        : Error(what), feasible_(feasible) {}
    bool feasible() const noexcept { return feasible_; }

private:
    bool feasible_;
};

/// A bracket for one of the running parameters is empty.
class NoCertificate : public Error {
public:
    NoCertificate(const std::string& what, std::string parameter, double lower, double upper)
        : Error(what), parameter_(std::move(parameter)), lower_(lower), upper_(upper) {}
    const std::string& parameter() const noexcept { return parameter_; }
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }

private:
    std::string parameter_;
    double lower_;
    double upper_;
};

}  // namespace lyapdim
