// errors.hpp — exception types shared across the library.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cascadelab {

struct InvalidConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Generator exhausted its iteration budget without a valid result.
struct GenerationFailureError : std::runtime_error {
    std::size_t iterations;
    GenerationFailureError(const std::string& what, std::size_t iters)
        : std::runtime_error(what), iterations(iters) {}
};

// Rejection sampling stopped making progress.
struct ProgressFailureError : std::runtime_error {
    std::size_t rejections;
    ProgressFailureError(const std::string& what, std::size_t rejected)
        : std::runtime_error(what), rejections(rejected) {}
};

struct ParseError : std::runtime_error {
    std::size_t line;
    ParseError(const std::string& what, std::size_t line_no)
        : std::runtime_error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

}  // namespace cascadelab
