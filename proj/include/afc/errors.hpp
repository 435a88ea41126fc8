#pragma once

#include <stdexcept>
#include <string>

namespace afc {

/// Invalid user configuration (bad geometry, unknown key, missing file).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Solver blow-up, Poisson non-convergence, non-finite network output.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or incompatible serialized data (checkpoints, model files, frames).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lost or refused connection. Retryable, unlike a NOT_FOUND answer.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace afc
