#pragma once

#include <stdexcept>
#include <string>

namespace kickrom {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A physical or numerical parameter is outside its admissible domain.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// The characteristic-equation scan could not bracket the requested roots.
class RootSearchError : public Error {
public:
    using Error::Error;
};

/// A linear solve at a characteristic root was singular or badly conditioned.
class ConditioningError : public Error {
public:
    using Error::Error;
};

/// A discrete mode does not agree with the region of the continuous state.
class HybridConsistencyError : public Error {
public:
    using Error::Error;
};

/// A transition was requested away from every region boundary.
class EventConsistencyError : public Error {
public:
    using Error::Error;
};

/// The adaptive step size collapsed (typically chattering at an event surface).
class IntegrationStallError : public Error {
public:
    using Error::Error;
};

/// Malformed or incomplete input data (grids, files, traces, CLI arguments).
class InputError : public Error {
public:
    using Error::Error;
};

/// Two records could not be aligned (different grids or periods).
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// Reduced-model assembly produced an indefinite effective mass.
class AssemblyError : public Error {
public:
    using Error::Error;
};

}  // namespace kickrom
