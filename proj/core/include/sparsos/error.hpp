#ifndef SPARSOS_ERROR_HPP
#define SPARSOS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sparsos {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input that cannot be parsed (problem files, certificates, solution files).
struct ParseError : Error {
    ParseError(const std::string& msg, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line(line) {}
    int line;
};

} // namespace sparsos

#endif
