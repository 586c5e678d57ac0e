#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "uscan/types.hpp"

namespace uscan {

/// Wedge where the resection cavity breaches past the central-zone
/// boundary into the peripheral shell. Angles in radians, slices as
/// half-open index range [slice_begin, slice_end).
struct PerforationPatch {
    int slice_begin = 0;
    int slice_end = 0;
    double angle_begin = 0.0;
    double angle_end = 0.0;
    double depth_mm = 0.0;
};

/// Resection cavity carved around the urethral axis. The radius profile
/// is given as control values along the scan and resampled linearly onto
/// the slice grid; jaggedness modulates the radius with smooth seeded
/// angular noise.
struct ResectionSpec {
    std::vector<double> radius_profile_mm{6.0};
    double jaggedness = 0.0;  // relative amplitude in [0, ~0.4]
    std::vector<PerforationPatch> patches;
};

/// Two-zone ellipsoidal phantom centered in the scanned volume. The
/// central zone must fit strictly inside the outer one; both share the
/// urethral axis running along the scan direction.
struct PhantomSpec {
    std::array<double, 3> outer_radii_mm{22.0, 18.0, 32.0};
    std::array<double, 3> central_radii_mm{13.0, 10.0, 31.0};
    double channel_radius_mm = 1.2;  // unresected urethral channel
    std::optional<ResectionSpec> resection;
    std::array<int, kNumClasses> intensities{20, 180, 90, 45};  // per class code
    double speckle_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;  // throws GeometryInvalid
};

/// Rasterize the phantom onto the manifest's voxel grid and render the
/// matching ultrasound-like stack (class intensity times log-normal
/// speckle). Labels are the exact geometry; determinism is per
/// (spec.seed, slice), so slice-parallel rendering cannot change output.
std::pair<ImageStack, LabelVolume> synth_phantom(const PhantomSpec& spec,
                                                 const ScanManifest& manifest);

/// Analytic volume of the ellipsoid with the given semi-axes.
double ellipsoid_volume_mm3(const std::array<double, 3>& radii);

/// Analytic in-plane area of the perforation wedges on one slice
/// (numeric quadrature over the patch angle ranges), for oracle checks.
double analytic_perforation_area_mm2(const PhantomSpec& spec, const ScanManifest& manifest,
                                     int slice);

}  // namespace uscan
