#pragma once

#include <stdexcept>
#include <string>

namespace opdyn {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A power exceeded the configured transport horizon.
class HorizonError : public Error {
public:
    using Error::Error;
};

/// An index left a declared permutation window or the working-window cap,
/// or a transported coefficient left the representable range.
class WindowError : public Error {
public:
    using Error::Error;
};

/// An iterative method (power iteration, Jacobi sweeps) did not converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed scenario, matrix file or instance description.
class SchemaError : public Error {
public:
    using Error::Error;
};

}  // namespace opdyn
