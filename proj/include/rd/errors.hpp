#pragma once

#include <stdexcept>
#include <string>

namespace rd {

// Stable error codes; the numeric values are part of the CLI contract.
enum class ErrorCode : int {
    NonlinearParameterProduct = 10,
    UDegreeOverflow = 11,
    NoSolution = 20,
    DegreeMismatch = 21,
    NotPoissonInput = 22,
    NoDxFactor = 23,
    NotConstantCoefficients = 24,
    MissingStructure = 25,
    OutOfRange = 26,
    SyntaxError = 30,
    UnknownParameter = 31,
    InvalidArgument = 32,
};

const char* error_name(ErrorCode code) noexcept;

// True for failures of the mathematics (exit status 2), false for usage errors.
bool is_mathematical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace rd
