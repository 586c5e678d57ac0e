#include <doctest.h>

#include "helpers.hpp"
#include "uscan/phantom.hpp"

using namespace uscan;

namespace {

ScanManifest test_manifest(int w = 128, int h = 128, int n = 40) {
    return ScanManifest::make(n, w, h, 0.4, 60.0, "synthetic");
}

PhantomSpec base_spec() {
    PhantomSpec spec;
    spec.outer_radii_mm = {22.0, 18.0, 32.0};
    spec.central_radii_mm = {13.0, 10.0, 31.0};
    spec.channel_radius_mm = 1.2;
    spec.intensities = {20, 200, 140, 45};
    spec.speckle_sigma = 0.0;
    spec.seed = 0;
    return spec;
}

}  // namespace

TEST_CASE("zero speckle renders exact class intensities") {
    const auto [stack, truth] = synth_phantom(base_spec(), test_manifest());
    const auto& spec = base_spec();
    for (int k = 0; k < truth.manifest.slice_count; ++k)
        for (std::size_t i = 0; i < truth.labels[k].size(); ++i)
            CHECK(stack.slices[k].pixels()[i] ==
                  spec.intensities[truth.labels[k].pixels()[i]]);
}

TEST_CASE("channel radius zero and no resection leaves no class-3 voxels") {
    PhantomSpec spec = base_spec();
    spec.channel_radius_mm = 0.0;
    const auto [stack, truth] = synth_phantom(spec, test_manifest());
    for (const auto& slice : truth.labels)
        for (auto v : slice.pixels()) CHECK(v != 3);
}

TEST_CASE("without a resection class 3 stays within the channel") {
    const PhantomSpec spec = base_spec();
    const auto [stack, truth] = synth_phantom(spec, test_manifest());
    const auto& m = truth.manifest;
    bool any = false;
    for (int k = 0; k < m.slice_count; ++k)
        for (int y = 0; y < m.pixel_height; ++y)
            for (int x = 0; x < m.pixel_width; ++x) {
                if (truth.labels[k].at(x, y) != 3) continue;
                any = true;
                const double dx = (x + 0.5) * m.pixel_size_mm - 0.5 * m.pixel_width * m.pixel_size_mm;
                const double dy = (y + 0.5) * m.pixel_size_mm - 0.5 * m.pixel_height * m.pixel_size_mm;
                CHECK(std::hypot(dx, dy) <= spec.channel_radius_mm + 1e-9);
            }
    CHECK(any);
}

TEST_CASE("same spec and seed give bit-identical output") {
    PhantomSpec spec = base_spec();
    spec.speckle_sigma = 0.1;
    spec.seed = 1234;
    const auto [s1, t1] = synth_phantom(spec, test_manifest());
    const auto [s2, t2] = synth_phantom(spec, test_manifest());
    for (int k = 0; k < t1.manifest.slice_count; ++k) {
        CHECK(s1.slices[k] == s2.slices[k]);
        CHECK(t1.labels[k] == t2.labels[k]);
    }

    spec.seed = 1235;  // different stream
    const auto [s3, t3] = synth_phantom(spec, test_manifest());
    bool differs = false;
    for (int k = 0; k < t1.manifest.slice_count && !differs; ++k)
        differs = !(s1.slices[k] == s3.slices[k]);
    CHECK(differs);
}

TEST_CASE("rasterized class fractions match analytic ellipsoid volumes to 2%") {
    // no channel, no resection: classes are pure ellipsoid shells
    PhantomSpec spec = base_spec();
    spec.channel_radius_mm = 0.0;
    const ScanManifest m = ScanManifest::make(85, 256, 256, 0.2, 60.0, "synthetic");
    const auto [stack, truth] = synth_phantom(spec, m);

    std::size_t n_central = 0, n_outer_total = 0;
    for (const auto& slice : truth.labels)
        for (auto v : slice.pixels()) {
            if (v == 2) ++n_central;
            if (v == 1 || v == 2) ++n_outer_total;
        }
    const double voxel = m.pixel_size_mm * m.pixel_size_mm * m.slice_spacing_mm;
    const double v_central = double(n_central) * voxel;
    const double v_outer = double(n_outer_total) * voxel;
    CHECK(v_central ==
          doctest::Approx(ellipsoid_volume_mm3(spec.central_radii_mm)).epsilon(0.02));
    CHECK(v_outer == doctest::Approx(ellipsoid_volume_mm3(spec.outer_radii_mm)).epsilon(0.02));
}

TEST_CASE("perforation patches place class-3 voxels inside the peripheral shell") {
    PhantomSpec spec = base_spec();
    ResectionSpec res;
    res.radius_profile_mm = {5.0, 7.0, 5.0};
    res.jaggedness = 0.0;
    res.patches.push_back({10, 25, 0.2, 0.9, 2.0});
    spec.resection = res;
    const ScanManifest m = test_manifest(192, 192, 40);
    const auto [stack, truth] = synth_phantom(spec, m);

    // class-3 voxels beyond the central ellipsoid cross-section = breach
    std::size_t breach = 0;
    const auto [ac, bc, cc] = spec.central_radii_mm;
    for (int k = 0; k < m.slice_count; ++k) {
        const double z = (k + 0.5) * m.slice_spacing_mm - 0.5 * m.scan_length_mm;
        for (int y = 0; y < m.pixel_height; ++y)
            for (int x = 0; x < m.pixel_width; ++x) {
                if (truth.labels[k].at(x, y) != 3) continue;
                const double dx =
                    (x + 0.5) * m.pixel_size_mm - 0.5 * m.pixel_width * m.pixel_size_mm;
                const double dy =
                    (y + 0.5) * m.pixel_size_mm - 0.5 * m.pixel_height * m.pixel_size_mm;
                const double q = (dx / ac) * (dx / ac) + (dy / bc) * (dy / bc) + (z / cc) * (z / cc);
                if (q > 1.0) {
                    ++breach;
                    const bool in_range = k >= 10 && k < 25;
                    CHECK(in_range);  // breaches only inside the configured patch
                }
            }
    }
    CHECK(breach > 0);
}

TEST_CASE("invalid geometry is rejected") {
    PhantomSpec spec = base_spec();
    spec.central_radii_mm = {23.0, 10.0, 31.0};  // wider than outer
    CHECK_THROWS_AS(spec.validate(), GeometryInvalid);

    spec = base_spec();
    spec.intensities = {20, 200, 140, 130};  // 140 vs 130 too close
    CHECK_THROWS_AS(spec.validate(), GeometryInvalid);
}
