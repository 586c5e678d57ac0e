#include <doctest.h>

#include <queue>
#include <random>

#include "helpers.hpp"
#include "uscan/image_ops.hpp"

using namespace uscan;

TEST_CASE("gaussian blur: sigma zero is the identity, mass is preserved") {
    ImageF img(9, 9);
    img.at(4, 4) = 100.0;
    CHECK(gaussian_blur(img, 0.0) == img);
    const ImageF b = gaussian_blur(img, 1.5);
    double sum = 0.0;
    for (auto v : b.pixels()) sum += v;
    CHECK(sum == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(b.at(4, 4) > b.at(3, 4));
}

namespace {

// independent dense min/max filter over an exact disk
Image8 brute_disk_filter(const Image8& img, int radius, bool take_min) {
    Image8 out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            int acc = take_min ? 255 : 0;
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx) {
                    if (dx * dx + dy * dy > radius * radius) continue;
                    const int xx = std::clamp(x + dx, 0, img.width() - 1);
                    const int yy = std::clamp(y + dy, 0, img.height() - 1);
                    const int v = img.at(xx, yy);
                    acc = take_min ? std::min(acc, v) : std::max(acc, v);
                }
            out.at(x, y) = std::uint8_t(acc);
        }
    return out;
}

}  // namespace

TEST_CASE("disk erosion/dilation match a brute-force oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 4; ++trial) {
        Image8 img(23, 17);
        for (auto& v : img.pixels()) v = std::uint8_t(rng() % 256);
        for (int radius : {1, 2, 5}) {
            CHECK(erode_disk(img, radius) == brute_disk_filter(img, radius, true));
            CHECK(dilate_disk(img, radius) == brute_disk_filter(img, radius, false));
        }
    }
}

TEST_CASE("flood fill matches an independent BFS oracle on a ring") {
    Image8 img(21, 21, 0);
    // ring of 255 around the center
    for (int y = 0; y < 21; ++y)
        for (int x = 0; x < 21; ++x) {
            const double r = std::hypot(x - 10.0, y - 10.0);
            if (r >= 6.0 && r <= 8.0) img.at(x, y) = 255;
        }

    const Mask2D region = flood_fill(img, 10, 10, 0);

    // oracle: plain queue BFS over equal-valued 4-neighbors
    Mask2D oracle(21, 21);
    std::queue<std::pair<int, int>> q;
    q.push({10, 10});
    oracle.at(10, 10) = 1;
    while (!q.empty()) {
        auto [x, y] = q.front();
        q.pop();
        const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const int nx = x + dx[k], ny = y + dy[k];
            if (nx < 0 || ny < 0 || nx >= 21 || ny >= 21) continue;
            if (oracle.at(nx, ny) || img.at(nx, ny) != 0) continue;
            oracle.at(nx, ny) = 1;
            q.push({nx, ny});
        }
    }
    CHECK(region == oracle);
    // the ring itself must not leak into the region
    CHECK_FALSE(region.at(10, 3));
}

TEST_CASE("flood fill: uniform image fills everything, bad seed throws") {
    Image8 img(7, 5, 42);
    const Mask2D all = flood_fill(img, 3, 2, 0);
    for (auto v : all.pixels()) CHECK(v == 1);
    CHECK_THROWS_AS(flood_fill(img, -1, 0, 0), SeedOutOfBounds);
    CHECK_THROWS_AS(flood_fill(img, 7, 0, 0), SeedOutOfBounds);
}

TEST_CASE("flood fill honors tolerance") {
    Image8 img(5, 1, 100);
    img.at(2, 0) = 108;
    img.at(3, 0) = 120;
    const Mask2D r = flood_fill(img, 0, 0, 10);
    CHECK(r.at(2, 0));   // within 10 of the seed
    CHECK_FALSE(r.at(3, 0));
    CHECK_FALSE(r.at(4, 0));  // blocked by the out-of-tolerance pixel
}

TEST_CASE("connected components and largest component") {
    Mask2D m(10, 4);
    for (int x = 0; x < 3; ++x) m.at(x, 0) = 1;        // 3 px
    for (int x = 5; x < 10; ++x) m.at(x, 2) = 1;       // 5 px
    auto [labels, counts] = connected_components(m);
    REQUIRE(counts.size() == 3);
    CHECK(counts[1] + counts[2] == 8);
    const Mask2D big = largest_component(m);
    std::size_t big_count = 0;
    for (auto v : big.pixels()) big_count += v;
    CHECK(big_count == 5);
    CHECK(big.at(7, 2));
    CHECK_FALSE(big.at(0, 0));
}

TEST_CASE("fill_holes closes enclosed pockets only") {
    Mask2D m(11, 11);
    for (int y = 2; y <= 8; ++y)
        for (int x = 2; x <= 8; ++x)
            if (x == 2 || x == 8 || y == 2 || y == 8) m.at(x, y) = 1;
    const Mask2D f = fill_holes(m);
    CHECK(f.at(5, 5));      // enclosed
    CHECK_FALSE(f.at(0, 0));  // outside stays open
}

TEST_CASE("rasterize/trace round trip keeps IoU >= 0.99") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 12; ++trial) {
        const auto c = testutil::random_simple_polygon(rng, 60.0, 60.0, 25.0, 45.0, 16, 40);
        const Mask2D  mask = rasterize_contour(c, 120, 120);
        const auto back = boundary_contour(mask);
        REQUIRE(back.has_value());
        const Mask2D re = rasterize_contour(*back, 120, 120);
        CHECK(testutil::mask_iou(mask, re) >= 0.99);
    }
}

TEST_CASE("marching squares on a single pixel gives the half-unit diamond") {
    Mask2D m(5, 5);
    m.at(2, 2) = 1;
    const auto loops = trace_boundaries(m);
    REQUIRE(loops.size() == 1);
    CHECK(loops[0].size() == 4);
    double area = 0.0;
    for (std::size_t i = 0; i < loops[0].size(); ++i) {
        const Vec2& a = loops[0][i];
        const Vec2& b = loops[0][(i + 1) % loops[0].size()];
        area += a.x * b.y - b.x * a.y;
    }
    CHECK(std::abs(area) * 0.5 == doctest::Approx(0.5));
}

TEST_CASE("convex hull of a plus-shape is its bounding diamond corners") {
    Mask2D m(9, 9);
    for (int i = 1; i <= 7; ++i) {
        m.at(i, 4) = 1;
        m.at(4, i) = 1;
    }
    const auto hull = convex_hull_points(m);
    REQUIRE(hull.size() == 4);
    CHECK(inside_convex(hull, {4.0, 4.0}));
    CHECK(inside_convex(hull, {4.0, 1.0}));   // vertex counts as inside
    CHECK_FALSE(inside_convex(hull, {1.0, 1.0}));  // corner of the square, outside the diamond
}
