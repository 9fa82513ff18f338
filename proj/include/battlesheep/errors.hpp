#pragma once

#include <stdexcept>
#include <string>

namespace battlesheep {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A structurally invalid Position (bad stack, empty board, duplicate cell).
class InvalidPosition : public Error {
public:
    using Error::Error;
};

class IllegalMove : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

// Parse failure for line-based text formats; line() is 1-based, 0 if unknown.
class ParseError : public Error {
public:
    enum class Kind { Syntax, DuplicateCoordinate, NeutralOverfull, MissingTurn, InvalidStack };

    ParseError(Kind kind, int line, const std::string& what)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          kind_(kind),
          line_(line) {}

    Kind kind() const { return kind_; }
    int line() const { return line_; }

private:
    Kind kind_;
    int line_;
};

}  // namespace battlesheep
