#ifndef SACC_ERROR_HPP
#define SACC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sacc {

enum class ErrorCode {
    NonIntegerOutput,
    NonPositive,
    ShiftOutOfRange,
    WidthOutOfRange,
    ChainMismatch,
    ShapeMismatch,
    OddDimension,
    RowTooWide,
    UnsupportedStride,
    UnsupportedPadding,
    FilterWidthMismatch,
    EmptyRange,
    NotDefaultConfig,
    LoggingDisabled,
    IoError,
    FormatError,
    MissingPath,
    Internal,
};

const char* error_code_name(ErrorCode code);

class SimError : public std::runtime_error {
public:
    SimError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
    throw SimError(code, what);
}

}  // namespace sacc

#endif
