#pragma once

#include <stdexcept>
#include <string>

namespace trispec {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define TRISPEC_ERROR_TYPE(Name)                                  \
    struct Name : Error {                                         \
        explicit Name(const std::string& msg) : Error(msg) {}     \
    }

TRISPEC_ERROR_TYPE(StepSizeUnderflow);
TRISPEC_ERROR_TYPE(OverflowGuard);
TRISPEC_ERROR_TYPE(NotContractive);
TRISPEC_ERROR_TYPE(QuadratureStall);
TRISPEC_ERROR_TYPE(ZeroOnContour);
TRISPEC_ERROR_TYPE(NonIntegerWinding);
TRISPEC_ERROR_TYPE(NotSimpleInDisk);
TRISPEC_ERROR_TYPE(NoConvergence);
TRISPEC_ERROR_TYPE(LostTrack);
TRISPEC_ERROR_TYPE(CollisionNotBracketed);
TRISPEC_ERROR_TYPE(InsufficientData);
TRISPEC_ERROR_TYPE(PeriodicityViolation);
TRISPEC_ERROR_TYPE(DegenerateFit);
TRISPEC_ERROR_TYPE(ConfigError);

#undef TRISPEC_ERROR_TYPE

}  // namespace trispec
