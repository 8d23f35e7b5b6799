#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace hadactl {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain where the operator is defined (t <= a, tau <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid model parameter (fractional order, Mittag-Leffler beta, quadrature size).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A numerical kernel failed to converge.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, double alpha, double beta, double z)
        : Error(what), alpha_(alpha), beta_(beta), z_(z) {}

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double z() const noexcept { return z_; }

private:
    double alpha_;
    double beta_;
    double z_;
};

/// Region, box or actuator support not contained in the domain.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Inconsistent configuration: channel counts, mode lists, scenario fields.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Energy-type time integral diverges (alpha <= 1/2) and no epsilon cutoff was configured.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Linear system too singular to solve even with the pseudo-inverse fallback.
class IllPosedError : public Error {
public:
    using Error::Error;
};

namespace detail {

template <class... Args>
std::string concat(const Args&... args) {
    std::ostringstream os;
    os.precision(17);
    (os << ... << args);
    return os.str();
}

}  // namespace detail
}  // namespace hadactl
