#ifndef SPIKEHYBRID_ERRORS_HPP
#define SPIKEHYBRID_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spikehybrid {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Solver errors.
class InitialStateOutsideCD : public Error {
public:
    using Error::Error;
};

class EventLocalizationFailure : public Error {
public:
    using Error::Error;
};

/// Too many consecutive jumps without any flow time (Zeno guard).
class StagnationError : public Error {
public:
    using Error::Error;
};

class TimeOutsideDomain : public Error {
public:
    using Error::Error;
};

// Model and analysis errors.
class ParamOutOfRange : public Error {
public:
    using Error::Error;
};

class DegenerateVelocity : public Error {
public:
    using Error::Error;
};

class OriginState : public Error {
public:
    using Error::Error;
};

class DomainTooShort : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or serialized input.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace spikehybrid

#endif // SPIKEHYBRID_ERRORS_HPP
