#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace exo {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration value. `field()` is the dotted path, e.g. "pso.bounds.kappa".
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Argument outside the domain of a numerical routine (NaN, infinity).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The integrated state became non-finite.
class NonFiniteState : public Error {
public:
    NonFiniteState(double last_good_time, const std::string& what)
        : Error(what), last_good_time_(last_good_time) {}

    double last_good_time() const noexcept { return last_good_time_; }

private:
    double last_good_time_;
};

class EmptyLog : public Error {
public:
    EmptyLog() : Error("trajectory log is empty") {}
};

/// Trajectory does not cover the time window a constraint needs.
class WindowError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. `line()` is 1-based, 0 when not line oriented.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// An objective evaluation threw; carries the particle that triggered it.
class EvaluatorFailure : public Error {
public:
    EvaluatorFailure(std::size_t particle, const std::string& what)
        : Error("evaluation of particle " + std::to_string(particle) + " failed: " + what),
          particle_(particle) {}

    std::size_t particle() const noexcept { return particle_; }

private:
    std::size_t particle_;
};

}  // namespace exo
