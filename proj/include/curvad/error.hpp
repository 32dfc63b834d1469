#pragma once

#include <stdexcept>
#include <string>

namespace curvad {

enum class ErrorKind {
    Parse,
    Validation,
    EmptyInput,
    Alignment,
    Argument,
    Io,
    UndefinedMetric,
    Training,
    Manifest,
    Usage,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base of every error raised by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define CURVAD_DEFINE_ERROR(Name, Kind)                                        \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
    };

CURVAD_DEFINE_ERROR(ParseError, Parse)
CURVAD_DEFINE_ERROR(ValidationError, Validation)
CURVAD_DEFINE_ERROR(EmptyInputError, EmptyInput)
CURVAD_DEFINE_ERROR(AlignmentError, Alignment)
CURVAD_DEFINE_ERROR(ArgumentError, Argument)
CURVAD_DEFINE_ERROR(IoError, Io)
CURVAD_DEFINE_ERROR(UndefinedMetricError, UndefinedMetric)
CURVAD_DEFINE_ERROR(TrainingError, Training)
CURVAD_DEFINE_ERROR(ManifestError, Manifest)
CURVAD_DEFINE_ERROR(UsageError, Usage)

#undef CURVAD_DEFINE_ERROR

}  // namespace curvad
