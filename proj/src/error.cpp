#include "epx/error.hpp"

namespace epx {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::EPProximity: return "EPProximity";
    case ErrorKind::NoFiniteEP: return "NoFiniteEP";
    case ErrorKind::NegativeAmplitude: return "NegativeAmplitude";
    case ErrorKind::EPOnContour: return "EPOnContour";
    case ErrorKind::Undersampled: return "Undersampled";
    case ErrorKind::AmbiguousTracking: return "AmbiguousTracking";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::ZeroNorm: return "ZeroNorm";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
{
}

}  // namespace epx
