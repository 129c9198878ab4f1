#pragma once

#include <stdexcept>
#include <string>

namespace nc {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Incompatible matrix or tuple dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

// A matrix was singular to working precision. Carries the magnitude of the
// offending pivot so callers can report how close to singular the input was.
class SingularError : public Error {
public:
    SingularError(const std::string& what, double pivot)
        : Error(what), pivot_(pivot) {}
    double pivot() const { return pivot_; }

private:
    double pivot_;
};

// Malformed expression text.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int col)
        : Error(what + " (line " + std::to_string(line) + ", column " +
                std::to_string(col) + ")"),
          line_(line), col_(col) {}
    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

// Structurally invalid AST or block-shape mismatch (ragged grids, adding a
// scalar to a non-square matricial value, and so on).
class StructureError : public Error {
public:
    using Error::Error;
};

// Bad inputs that are not syntax errors: failed preconditions, malformed
// JSON payloads, refused operations.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A continuation left the domain of definition (singular value or forbidden
// determinant) at parameter t.
class DomainExitError : public Error {
public:
    DomainExitError(const std::string& what, double t)
        : Error(what + " (at t=" + std::to_string(t) + ")"), t_(t) {}
    double t() const { return t_; }

private:
    double t_;
};

}  // namespace nc
