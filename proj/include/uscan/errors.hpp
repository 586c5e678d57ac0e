#pragma once

#include <stdexcept>
#include <string>

namespace uscan {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define USCAN_DEFINE_ERROR(Name)                                      \
    class Name : public Error {                                       \
    public:                                                           \
        explicit Name(const std::string& msg = #Name) : Error(msg) {} \
    }

// capture / stack I/O
USCAN_DEFINE_ERROR(NoScanDetected);
USCAN_DEFINE_ERROR(InsufficientFrames);
USCAN_DEFINE_ERROR(RoiOutOfBounds);
USCAN_DEFINE_ERROR(MalformedManifest);
USCAN_DEFINE_ERROR(SliceCountMismatch);
USCAN_DEFINE_ERROR(CorruptImage);

// phantom generation
USCAN_DEFINE_ERROR(GeometryInvalid);

// segmentation
USCAN_DEFINE_ERROR(TooFewPoints);
USCAN_DEFINE_ERROR(NonFiniteEnergy);
USCAN_DEFINE_ERROR(BadRadius);
USCAN_DEFINE_ERROR(DegenerateInit);
USCAN_DEFINE_ERROR(NoContrast);
USCAN_DEFINE_ERROR(SeedOutOfBounds);
USCAN_DEFINE_ERROR(ContainmentViolation);
USCAN_DEFINE_ERROR(FatalSegmentation);
USCAN_DEFINE_ERROR(DegenerateContour);

// evaluation & metrics
USCAN_DEFINE_ERROR(DimensionMismatch);
USCAN_DEFINE_ERROR(EmptyStack);

// reconstruction
USCAN_DEFINE_ERROR(EmptyGrid);
USCAN_DEFINE_ERROR(InconsistentWinding);
USCAN_DEFINE_ERROR(EmptyMesh);
USCAN_DEFINE_ERROR(IoFailure);

// augmentation
USCAN_DEFINE_ERROR(EmptyResection);
USCAN_DEFINE_ERROR(ConstraintCollapse);
USCAN_DEFINE_ERROR(NoVariants);

// pipeline
USCAN_DEFINE_ERROR(ConfigInvalid);

#undef USCAN_DEFINE_ERROR

}  // namespace uscan
