#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "uscan/types.hpp"

namespace testutil {

using uscan::Contour;
using uscan::Image8;
using uscan::Mask2D;
using uscan::Vec2;

inline double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

/// Star-shaped polygon around a center: sorted angles + random radii.
/// Simple by construction.
inline Contour random_simple_polygon(std::mt19937_64& rng, double cx, double cy,
                                     double r_lo, double r_hi, int n_min = 8, int n_max = 40) {
    const int n = n_min + int(uniform01(rng) * (n_max - n_min));
    std::vector<double> angles(n);
    for (auto& a : angles) a = uniform01(rng) * 2.0 * 3.14159265358979323846;
    std::sort(angles.begin(), angles.end());
    // nudge duplicate angles apart so edges never degenerate
    for (int i = 1; i < n; ++i)
        if (angles[i] - angles[i - 1] < 1e-6) angles[i] = angles[i - 1] + 1e-4;
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (double a : angles) {
        const double r = r_lo + uniform01(rng) * (r_hi - r_lo);
        pts.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
    }
    return Contour(std::move(pts));
}

inline Contour circle_polygon(double cx, double cy, double r, int n) {
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * 3.14159265358979323846 * i / n;
        pts.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
    }
    return Contour(std::move(pts));
}

inline double mask_iou(const Mask2D& a, const Mask2D& b) {
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        inter += a.pixels()[i] && b.pixels()[i];
        uni += a.pixels()[i] || b.pixels()[i];
    }
    return uni == 0 ? 1.0 : double(inter) / double(uni);
}

inline std::uint64_t file_hash(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    const std::string data = ss.str();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("uscan_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testutil
