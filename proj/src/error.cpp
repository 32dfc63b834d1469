#include "curvad/error.hpp"

namespace curvad {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Parse: return "parse error";
        case ErrorKind::Validation: return "validation error";
        case ErrorKind::EmptyInput: return "empty input";
        case ErrorKind::Alignment: return "alignment error";
        case ErrorKind::Argument: return "argument error";
        case ErrorKind::Io: return "i/o error";
        case ErrorKind::UndefinedMetric: return "undefined metric";
        case ErrorKind::Training: return "training error";
        case ErrorKind::Manifest: return "manifest error";
        case ErrorKind::Usage: return "usage error";
    }
    return "error";
}

}  // namespace curvad
