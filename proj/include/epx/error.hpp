#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace epx {

enum class ErrorKind {
    InvalidArgument,
    OutOfRange,
    EPProximity,
    NoFiniteEP,
    NegativeAmplitude,
    EPOnContour,
    Undersampled,
    AmbiguousTracking,
    StepSizeUnderflow,
    NonFinite,
    ZeroNorm,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace epx
