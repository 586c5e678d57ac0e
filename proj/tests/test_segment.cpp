#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "uscan/image_ops.hpp"
#include "uscan/phantom.hpp"
#include "uscan/segment.hpp"

using namespace uscan;

namespace {

Image8 disk_image(int w, int h, double cx, double cy, double r, std::uint8_t fg,
                  std::uint8_t bg) {
    Image8 img(w, h, bg);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) img.at(x, y) = fg;
    return img;
}

Mask2D disk_mask(int w, int h, double cx, double cy, double r) {
    Mask2D m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.at(x, y) = 1;
    return m;
}

SnakeParams default_snake() {
    SnakeParams p;
    p.alpha = 0.015;
    p.beta = 10.0;
    p.gamma = 0.001;
    p.max_iters = 2500;
    p.convergence_tol = 0.1;
    p.n_points = 200;
    return p;
}

PhantomSpec accept_spec() {
    PhantomSpec spec;
    spec.outer_radii_mm = {22.0, 18.0, 32.0};
    spec.central_radii_mm = {13.0, 10.0, 31.0};
    spec.channel_radius_mm = 1.2;
    spec.intensities = {20, 200, 140, 45};
    ResectionSpec res;
    res.radius_profile_mm = {4.0, 7.5, 8.5, 7.0, 4.0};
    res.jaggedness = 0.12;
    spec.resection = res;
    return spec;
}

SegmentConfig default_seg(int w, int h) {
    SegmentConfig cfg;
    cfg.init_rect = {0.04 * w, 0.04 * h, 0.92 * w, 0.92 * h};
    return cfg;
}

}  // namespace

TEST_CASE("snake settles on a bright disk: region IoU >= 0.98 vs the analytic disk") {
    const int w = 200, h = 200;
    const double r = 60.0;
    const Image8 img = disk_image(w, h, 100.0, 100.0, r, 200, 30);
    const Contour init = rect_contour({15, 15, 170, 170}, 200);

    bool converged = false;
    const Contour out = active_contour(img, init, default_snake(), 2.0, &converged);
    CHECK(converged);

    const Mask2D got = rasterize_contour(out, w, h);
    const Mask2D truth = disk_mask(w, h, 100.0, 100.0, r);
    CHECK(testutil::mask_iou(got, truth) >= 0.98);
}

TEST_CASE("snake on a uniform image shrinks strictly every iteration") {
    const Image8 img(120, 120, 128);
    const Contour init = rect_contour({20, 20, 80, 80}, 100);
    SnakeParams p = default_snake();
    p.convergence_tol = 0.0;  // never converge early

    double prev_area = init.area();
    for (int iters = 1; iters <= 6; ++iters) {
        p.max_iters = iters;
        const Contour c = active_contour(img, init, p, 0.0);
        const double area = c.area();
        CHECK(area < prev_area);
        prev_area = area;
    }
}

TEST_CASE("snake input validation") {
    const Image8 img(32, 32, 0);
    SnakeParams p = default_snake();
    p.n_points = 3;
    const Contour init = rect_contour({4, 4, 20, 20}, 16);
    CHECK_THROWS_AS(active_contour(img, init, p, 1.0), TooFewPoints);
    // a 3-point ring cannot even be built as a contour
    CHECK_THROWS_AS(Contour({{0, 0}, {4, 0}, {0, 4}}), TooFewPoints);
}

TEST_CASE("morphological contrast enhancement") {
    SUBCASE("uniform image is unchanged") {
        const Image8 img(31, 25, 77);
        CHECK(morph_contrast_enhance(img, 3) == img);
    }
    SUBCASE("single bright pixel saturates, neighbors untouched") {
        // isolated peak: the white top-hat equals the peak, the black one
        // is zero, so the pixel doubles and clamps
        Image8 img(7, 7, 0);
        img.at(3, 3) = 200;
        const Image8 out = morph_contrast_enhance(img, 2);
        for (int y = 0; y < 7; ++y)
            for (int x = 0; x < 7; ++x) {
                if (x == 3 && y == 3) CHECK(out.at(x, y) == 255);
                else CHECK(out.at(x, y) == 0);
            }
    }
    SUBCASE("radius zero throws") {
        CHECK_THROWS_AS(morph_contrast_enhance(Image8(5, 5, 0), 0), BadRadius);
    }
}

TEST_CASE("chan-vese splits a two-level image at IoU >= 0.99 vs the threshold oracle") {
    const int w = 96, h = 96;
    const Image8 img = disk_image(w, h, 48.0, 48.0, 30.0, 200, 50);
    // overlapping but offset circular init
    const Mask2D init = disk_mask(w, h, 40.0, 44.0, 18.0);

    ChanVeseParams cfg;
    const ChanVeseResult res = morph_chan_vese(img, init, cfg);
    CHECK(res.converged);

    Mask2D oracle(w, h);  // threshold at the midpoint of the two levels
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) oracle.at(x, y) = img.at(x, y) > 125 ? 1 : 0;
    CHECK(testutil::mask_iou(res.mask, oracle) >= 0.99);
}

TEST_CASE("chan-vese error cases") {
    const Image8 flat(32, 32, 99);
    CHECK_THROWS_AS(morph_chan_vese(flat, disk_mask(32, 32, 16, 16, 6), {}), NoContrast);
    CHECK_THROWS_AS(morph_chan_vese(flat, Mask2D(32, 32), {}), DegenerateInit);
    CHECK_THROWS_AS(morph_chan_vese(flat, Mask2D(32, 32, 1), {}), DegenerateInit);
}

TEST_CASE("chan-vese respects mirror symmetry") {
    const int w = 64, h = 48;
    Image8 img(w, h, 40);
    for (int y = 10; y < 38; ++y)
        for (int x = 12; x < 52; ++x) img.at(x, y) = 180;  // centered block
    // init symmetric about the vertical midline
    Mask2D init(w, h);
    for (int y = 16; y < 32; ++y)
        for (int x = 24; x < 40; ++x) init.at(x, y) = 1;

    ChanVeseParams cfg;
    cfg.max_iters = 40;
    const ChanVeseResult res = morph_chan_vese(img, init, cfg);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            CHECK(res.mask.at(x, y) == res.mask.at(w - 1 - x, y));
}

TEST_CASE("chan-vese energy surrogate never increases on clean two-level input") {
    const Image8 img = disk_image(80, 80, 40.0, 40.0, 24.0, 210, 40);
    const Mask2D init = disk_mask(80, 80, 34.0, 38.0, 14.0);
    const ChanVeseResult res = morph_chan_vese(img, init, {});
    REQUIRE(res.energy.size() >= 2);
    for (std::size_t i = 1; i < res.energy.size(); ++i)
        CHECK(res.energy[i] <= res.energy[i - 1] + 1e-9);
}

TEST_CASE("compose_mask applies precedence and containment") {
    const Contour outer({{2, 2}, {17, 2}, {17, 17}, {2, 17}});
    const Contour inner({{6, 6}, {13, 6}, {13, 13}, {6, 13}});
    Mask2D resect(20, 20);
    for (int y = 8; y <= 11; ++y)
        for (int x = 8; x <= 11; ++x) resect.at(x, y) = 1;

    const Image8 mask = compose_mask(outer, inner, resect, 20, 20);
    CHECK(mask.at(0, 0) == 0);
    CHECK(mask.at(4, 4) == 1);
    CHECK(mask.at(7, 7) == 2);
    CHECK(mask.at(9, 9) == 3);

    const Contour escaping({{6, 6}, {25, 6}, {25, 13}, {6, 13}});
    CHECK_THROWS_AS(compose_mask(outer, escaping, std::nullopt, 20, 20),
                    ContainmentViolation);
}

TEST_CASE("segment_frame on a noiseless phantom slice reaches per-class IoU >= 0.95") {
    PhantomSpec spec = accept_spec();
    spec.speckle_sigma = 0.0;
    const ScanManifest m = ScanManifest::make(85, 256, 256, 0.2, 60.0, "synthetic");
    const auto [stack, truth] = synth_phantom(spec, m);

    const int k = 42;  // mid-gland
    const FrameSegmentation seg = segment_frame(stack.slices[k], std::nullopt,
                                                default_seg(256, 256));

    for (int cls = 1; cls < kNumClasses; ++cls) {
        Mask2D got(256, 256), want(256, 256);
        for (int y = 0; y < 256; ++y)
            for (int x = 0; x < 256; ++x) {
                got.at(x, y) = seg.mask.at(x, y) == cls;
                want.at(x, y) = truth.labels[k].at(x, y) == cls;
            }
        CAPTURE(cls);
        CHECK(testutil::mask_iou(got, want) >= 0.95);
    }
}

TEST_CASE("identical consecutive frames with a propagated prior give identical masks") {
    PhantomSpec spec = accept_spec();
    const ScanManifest m = ScanManifest::make(85, 256, 256, 0.2, 60.0, "synthetic");
    const auto [stack, truth] = synth_phantom(spec, m);
    const SegmentConfig cfg = default_seg(256, 256);

    const FrameSegmentation first = segment_frame(stack.slices[40], std::nullopt, cfg);
    const FramePrior prior{first.outer, first.inner};
    const FrameSegmentation a = segment_frame(stack.slices[40], prior, cfg);
    const FrameSegmentation b = segment_frame(stack.slices[40], prior, cfg);
    CHECK(a.mask == b.mask);
}

TEST_CASE("rasterization identity: contour -> mask -> contour keeps IoU >= 0.99") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 8; ++trial) {
        const Contour c = testutil::random_simple_polygon(rng, 128.0, 128.0, 40.0, 70.0, 24, 48);
        const Mask2D mask = rasterize_contour(c, 256, 256);
        const auto back = boundary_contour(mask);
        REQUIRE(back.has_value());
        CHECK(testutil::mask_iou(mask, rasterize_contour(*back, 256, 256)) >= 0.99);
    }
}

TEST_CASE("single-slice stack behaves exactly like segment_frame") {
    PhantomSpec spec = accept_spec();
    const ScanManifest big = ScanManifest::make(85, 256, 256, 0.2, 60.0, "synthetic");
    const auto [stack, truth] = synth_phantom(spec, big);

    ImageStack single;
    single.manifest = ScanManifest::make(1, 256, 256, 0.2, 60.0 / 85.0, "synthetic");
    single.slices = {stack.slices[42]};

    const SegmentConfig cfg = default_seg(256, 256);
    const StackSegmentation out = segment_stack(single, cfg);
    const FrameSegmentation frame = segment_frame(stack.slices[42], std::nullopt, cfg);
    CHECK(out.volume.labels[0] == frame.mask);
    CHECK(out.records[0].ok);
}

TEST_CASE("all-uniform stack is a fatal segmentation failure") {
    ImageStack stack;
    stack.manifest = ScanManifest::make(5, 96, 96, 0.2, 5.0, "flat");
    stack.slices.assign(5, Image8(96, 96, 128));
    CHECK_THROWS_AS(segment_stack(stack, default_seg(96, 96)), FatalSegmentation);
}
