#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "uscan/ingest.hpp"
#include "uscan/stack_io.hpp"

using namespace uscan;

namespace {

Image8 flat_frame(int w, int h, std::uint8_t level) { return Image8(w, h, level); }

CaptureConfig small_cfg() {
    CaptureConfig cfg;
    cfg.gray_threshold = 20.0;
    cfg.roi_x = 2;
    cfg.roi_y = 1;
    cfg.roi_w = 8;
    cfg.roi_h = 6;
    cfg.retain_count = 3;
    cfg.frame_stride = 1;
    cfg.scan_length_mm = 60.0;
    cfg.pixel_size_mm = 0.1;
    cfg.source_id = "test";
    return cfg;
}

}  // namespace

TEST_CASE("scan start is the first frame whose mean exceeds the threshold") {
    CaptureConfig cfg = small_cfg();
    std::vector<Image8> frames;
    for (std::uint8_t level : {5, 5, 5, 40, 42}) frames.push_back(flat_frame(16, 8, level));
    CHECK(detect_scan_start(frames, cfg) == 3);

    frames.assign(4, flat_frame(16, 8, 10));
    CHECK_THROWS_AS(detect_scan_start(frames, cfg), NoScanDetected);

    frames.clear();
    for (std::uint8_t level : {30, 31, 32}) frames.push_back(flat_frame(16, 8, level));
    CHECK(detect_scan_start(frames, cfg) == 0);
}

TEST_CASE("detection is monotone in the threshold") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Image8> frames;
        const int n = 3 + int(rng() % 20);
        for (int i = 0; i < n; ++i)
            frames.push_back(flat_frame(8, 8, std::uint8_t(rng() % 250 + 1)));

        CaptureConfig lo = small_cfg(), hi = small_cfg();
        lo.gray_threshold = 1.0 + double(rng() % 200);
        hi.gray_threshold = lo.gray_threshold + double(rng() % 50);

        int idx_lo = -1, idx_hi = -1;
        try { idx_lo = detect_scan_start(frames, lo); } catch (const NoScanDetected&) {}
        try { idx_hi = detect_scan_start(frames, hi); } catch (const NoScanDetected&) {}
        if (idx_hi >= 0) {
            REQUIRE(idx_lo >= 0);        // lower threshold must fire too
            CHECK(idx_lo <= idx_hi);     // and never later
        }
    }
}

TEST_CASE("assemble_stack crops, strides and fills the manifest") {
    CaptureConfig cfg = small_cfg();
    cfg.retain_count = 85;
    std::vector<Image8> frames;
    for (int i = 0; i < 90; ++i) {
        Image8 f(16, 8, std::uint8_t(i));
        f.at(2, 1) = std::uint8_t(200 - i);  // top-left ROI pixel, to verify the crop
        frames.push_back(f);
    }
    const ImageStack stack = assemble_stack(frames, 2, cfg);
    CHECK(stack.manifest.slice_count == 85);
    CHECK(stack.manifest.pixel_width == 8);
    CHECK(stack.manifest.pixel_height == 6);
    CHECK(stack.manifest.slice_spacing_mm == doctest::Approx(60.0 / 85.0).epsilon(1e-12));
    CHECK(stack.slices[0].at(0, 0) == 198);  // frame 2's ROI origin
    CHECK(stack.slices[1].at(1, 1) == 3);    // frame 3 body value

    cfg.retain_count = 130;
    CHECK_THROWS_AS(assemble_stack(frames, 2, cfg), InsufficientFrames);
    std::vector<Image8> enough(135, flat_frame(16, 8, 9));
    CHECK(assemble_stack(enough, 0, cfg).manifest.slice_count == 130);
}

TEST_CASE("assemble_stack validates the ROI") {
    CaptureConfig cfg = small_cfg();
    cfg.roi_x = 12;  // 12 + 8 > 16
    std::vector<Image8> frames(5, flat_frame(16, 8, 9));
    CHECK_THROWS_AS(assemble_stack(frames, 0, cfg), RoiOutOfBounds);
}

TEST_CASE("assembled stacks satisfy the stack invariants for random configs") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const int fw = 12 + int(rng() % 30);
        const int fh = 10 + int(rng() % 30);
        CaptureConfig cfg;
        cfg.gray_threshold = 10.0;
        cfg.roi_x = int(rng() % 4);
        cfg.roi_y = int(rng() % 4);
        cfg.roi_w = 4 + int(rng() % (fw - cfg.roi_x - 4));
        cfg.roi_h = 4 + int(rng() % (fh - cfg.roi_y - 4));
        cfg.retain_count = 1 + int(rng() % 8);
        cfg.frame_stride = 1 + int(rng() % 3);
        cfg.pixel_size_mm = 0.05 + 0.001 * double(rng() % 100);
        cfg.scan_length_mm = 10.0 + double(rng() % 80);
        cfg.source_id = "prop";
        const int start = int(rng() % 3);
        std::vector<Image8> frames(
            std::size_t(start + cfg.retain_count * cfg.frame_stride + int(rng() % 4)),
            flat_frame(fw, fh, 77));
        const ImageStack stack = assemble_stack(frames, start, cfg);
        CHECK_NOTHROW(stack.validate());
    }
}

TEST_CASE("stack io round trip is exact") {
    const auto dir = testutil::scratch_dir("stack_io");
    ImageStack stack;
    stack.manifest = ScanManifest::make(3, 12, 9, 0.1, 6.0, "io-test", 120.0);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 3; ++k) {
        Image8 img(12, 9);
        for (auto& v : img.pixels()) v = std::uint8_t(rng() % 256);
        stack.slices.push_back(img);
    }
    write_stack(stack, dir);
    const ImageStack back = read_stack(dir);
    CHECK(back.manifest == stack.manifest);
    for (int k = 0; k < 3; ++k) CHECK(back.slices[k] == stack.slices[k]);
}

TEST_CASE("stack io failure modes") {
    const auto dir = testutil::scratch_dir("stack_io_bad");
    ImageStack stack;
    stack.manifest = ScanManifest::make(2, 6, 5, 0.1, 2.0, "x");
    stack.slices.assign(2, Image8(6, 5, 1));
    write_stack(stack, dir);

    SUBCASE("missing slice file") {
        std::filesystem::remove(dir / "slice_0001.png");
        CHECK_THROWS_AS(read_stack(dir), SliceCountMismatch);
    }
    SUBCASE("missing manifest") {
        std::filesystem::remove(dir / "manifest.json");
        CHECK_THROWS_AS(read_stack(dir), MalformedManifest);
    }
    SUBCASE("corrupt slice") {
        std::ofstream f(dir / "slice_0000.png", std::ios::binary | std::ios::trunc);
        f << "not a png";
        f.close();
        CHECK_THROWS_AS(read_stack(dir), CorruptImage);
    }
}

TEST_CASE("label volume io round trip") {
    const auto dir = testutil::scratch_dir("labels_io");
    LabelVolume vol;
    vol.manifest = ScanManifest::make(2, 8, 8, 0.2, 4.0, "x");
    vol.labels.assign(2, Image8(8, 8, 0));
    vol.labels[0].at(3, 3) = 2;
    vol.labels[1].at(4, 4) = 3;
    write_labels(vol, dir);
    const LabelVolume back = read_labels(dir);
    CHECK(back.manifest == vol.manifest);
    CHECK(back.labels[0] == vol.labels[0]);
    CHECK(back.labels[1] == vol.labels[1]);
    CHECK(std::filesystem::exists(dir / "slice_0000_labels.png"));
}

TEST_CASE("machine profiles carry capture defaults") {
    const auto e1 = machine_profile("sonoscape-e1");
    REQUIRE(e1.has_value());
    CHECK(e1->roi_w == 950);
    CHECK(e1->roi_h == 600);
    CHECK(e1->retain_count == 85);
    const auto ge = machine_profile("ge-logiq-p6");
    REQUIRE(ge.has_value());
    CHECK(ge->retain_count == 130);
    CHECK_FALSE(machine_profile("unknown-machine").has_value());
}
