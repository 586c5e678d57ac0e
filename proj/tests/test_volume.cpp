#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "uscan/stack_io.hpp"
#include "uscan/types.hpp"

using namespace uscan;

TEST_CASE("manifest derives slice spacing from scan length") {
    const ScanManifest m = ScanManifest::make(85, 950, 600, 0.085, 60.0, "sonoscape-e1");
    CHECK(m.slice_spacing_mm == doctest::Approx(60.0 / 85.0).epsilon(1e-12));
    CHECK_NOTHROW(m.validate());
}

TEST_CASE("manifest rejects inconsistent or nonpositive fields") {
    ScanManifest m = ScanManifest::make(10, 64, 64, 0.1, 20.0, "x");
    m.slice_spacing_mm = 2.1;  // 20/10 = 2.0
    CHECK_THROWS_AS(m.validate(), MalformedManifest);
    m = ScanManifest::make(10, 64, 64, 0.1, 20.0, "x");
    m.pixel_size_mm = 0.0;
    CHECK_THROWS_AS(m.validate(), MalformedManifest);
    CHECK_THROWS_AS(ScanManifest::make(0, 64, 64, 0.1, 20.0, "x"), MalformedManifest);
}

TEST_CASE("manifest json round-trip is bit-exact") {
    ScanManifest m = ScanManifest::make(85, 950, 600, 0.08537919, 60.0, "sonoscape-e1", 48.0);
    const ScanManifest back = manifest_from_json(manifest_to_json(m));
    CHECK(back == m);

    m.dynamic_range_db.reset();
    m.pixel_size_mm = 1.0 / 3.0;  // not representable in decimal
    m.scan_length_mm = 59.999999999999;
    m.slice_spacing_mm = m.scan_length_mm / m.slice_count;
    const ScanManifest back2 = manifest_from_json(manifest_to_json(m));
    CHECK(back2 == m);
}

namespace {

LabelVolume uniform_volume(int w, int h, int n, std::uint8_t cls) {
    LabelVolume vol;
    vol.manifest = ScanManifest::make(n, w, h, 0.1, double(n), "test");
    vol.labels.assign(n, Image8(w, h, cls));
    return vol;
}

}  // namespace

TEST_CASE("class_masks on uniform volumes") {
    const LabelVolume vol = uniform_volume(8, 6, 3, 2);
    const auto hit = vol.class_masks(VoxelClass::central);
    const auto miss = vol.class_masks(VoxelClass::resection);
    for (const auto& m : hit)
        for (auto v : m.pixels()) CHECK(v == 1);
    for (const auto& m : miss)
        for (auto v : m.pixels()) CHECK(v == 0);
}

TEST_CASE("class masks partition every voxel") {
    std::mt19937_64 rng(7);
    LabelVolume vol = uniform_volume(16, 12, 4, 0);
    for (auto& slice : vol.labels)
        for (auto& v : slice.pixels()) v = std::uint8_t(rng() % 4);
    vol.validate();

    for (int k = 0; k < vol.manifest.slice_count; ++k) {
        Mask2D sum(16, 12);
        for (int c = 0; c < kNumClasses; ++c) {
            const Mask2D m = vol.class_mask(k, VoxelClass(c));
            for (std::size_t i = 0; i < m.size(); ++i) sum.pixels()[i] += m.pixels()[i];
        }
        for (auto v : sum.pixels()) CHECK(v == 1);  // pairwise disjoint + covering
    }
}

TEST_CASE("label volume rejects out-of-range class codes") {
    LabelVolume vol = uniform_volume(4, 4, 2, 0);
    vol.labels[1].at(2, 2) = 4;
    CHECK_THROWS_AS(vol.validate(), Error);
}

TEST_CASE("contour validation") {
    CHECK_THROWS_AS(Contour({{0, 0}, {1, 0}, {0, 1}}), TooFewPoints);
    CHECK_THROWS_AS(Contour({{0, 0}, {1, 0}, {2, 0}, {3, 0}}), DegenerateContour);  // zero area
    // bow-tie self-intersection
    CHECK_THROWS_AS(Contour({{0, 0}, {2, 2}, {2, 0}, {0, 2}}), DegenerateContour);
}

TEST_CASE("contour geometry on a square") {
    const Contour c({{0, 0}, {2, 0}, {2, 2}, {0, 2}});
    CHECK(c.area() == doctest::Approx(4.0));
    CHECK(c.perimeter() == doctest::Approx(8.0));
    CHECK(c.centroid().x == doctest::Approx(1.0));
    CHECK(c.centroid().y == doctest::Approx(1.0));
    CHECK(c.contains({1.0, 1.0}));
    CHECK_FALSE(c.contains({3.0, 1.0}));

    const Contour half = c.scaled(0.5);
    CHECK(half.area() == doctest::Approx(1.0));
    CHECK(half.centroid().x == doctest::Approx(1.0));
}

TEST_CASE("trimesh validation catches bad indices and degenerate faces") {
    TriMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    m.triangles = {{0, 1, 2}};
    CHECK_NOTHROW(m.validate());
    m.triangles.push_back({0, 1, 9});
    CHECK_THROWS_AS(m.validate(), Error);
    m.triangles = {{0, 1, 1}};
    CHECK_THROWS_AS(m.validate(), Error);
}
