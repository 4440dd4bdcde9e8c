#ifndef BIGWORLD_ERRORS_HPP
#define BIGWORLD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bigworld {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Index outside the bounds of a matrix or table.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// Operands have incompatible shapes.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A bigraph value would violate a structural invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Interfaces do not line up for a composition.
class CompositionError : public Error {
public:
    using Error::Error;
};

/// A reaction rule could not be applied to the given match.
class ApplicationError : public Error {
public:
    using Error::Error;
};

/// Malformed input document.
class ParseError : public Error {
public:
    using Error::Error;
};

/// HTTP request failed.
class FetchError : public Error {
public:
    explicit FetchError(const std::string& what, int status = 0)
        : Error(what), status_(status) {}

    int status() const { return status_; }

private:
    int status_;
};

/// World construction failed (missing input, malformed hierarchy).
class BuildError : public Error {
public:
    using Error::Error;
};

/// Inconsistent source data (e.g. cyclic containment).
class DataError : public Error {
public:
    using Error::Error;
};

/// A name or node could not be found.
class LookupError : public Error {
public:
    using Error::Error;
};

/// A spatial name matched more than one node.
class ResolutionError : public Error {
public:
    using Error::Error;
};

}  // namespace bigworld

#endif  // BIGWORLD_ERRORS_HPP
