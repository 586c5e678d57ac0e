#include "uscan/types.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace uscan {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Proper segment intersection, shared endpoints excluded by the caller.
bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    auto cross = [](const Vec2& o, const Vec2& p, const Vec2& q) {
        return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
    };
    const double d1 = cross(c, d, a);
    const double d2 = cross(c, d, b);
    const double d3 = cross(a, b, c);
    const double d4 = cross(a, b, d);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

void ScanManifest::validate() const {
    std::ostringstream why;
    if (slice_count <= 0) why << "slice_count must be positive; ";
    if (pixel_width <= 0 || pixel_height <= 0) why << "pixel dimensions must be positive; ";
    if (!positive_finite(pixel_size_mm)) why << "pixel_size_mm must be positive; ";
    if (!positive_finite(scan_length_mm)) why << "scan_length_mm must be positive; ";
    if (!positive_finite(slice_spacing_mm)) why << "slice_spacing_mm must be positive; ";
    if (dynamic_range_db && !std::isfinite(*dynamic_range_db))
        why << "dynamic_range_db must be finite; ";
    if (why.str().empty() && slice_count > 0) {
        const double expected = scan_length_mm / slice_count;
        if (std::abs(slice_spacing_mm - expected) > 1e-9 * std::max(std::abs(expected), 1.0))
            why << "slice_spacing_mm inconsistent with scan_length_mm / slice_count; ";
    }
    if (!why.str().empty()) throw MalformedManifest("manifest invalid: " + why.str());
}

ScanManifest ScanManifest::make(int slice_count, int pixel_width, int pixel_height,
                                double pixel_size_mm, double scan_length_mm,
                                std::string source_id,
                                std::optional<double> dynamic_range_db) {
    ScanManifest m;
    m.slice_count = slice_count;
    m.pixel_width = pixel_width;
    m.pixel_height = pixel_height;
    m.pixel_size_mm = pixel_size_mm;
    m.scan_length_mm = scan_length_mm;
    m.slice_spacing_mm = slice_count > 0 ? scan_length_mm / slice_count : 0.0;
    m.source_id = std::move(source_id);
    m.dynamic_range_db = dynamic_range_db;
    m.validate();
    return m;
}

void ImageStack::validate() const {
    manifest.validate();
    if (static_cast<int>(slices.size()) != manifest.slice_count)
        throw SliceCountMismatch("stack holds " + std::to_string(slices.size()) +
                                 " slices, manifest says " + std::to_string(manifest.slice_count));
    for (const auto& s : slices)
        if (s.width() != manifest.pixel_width || s.height() != manifest.pixel_height)
            throw DimensionMismatch("slice dimensions differ from manifest");
}

void LabelVolume::validate() const {
    manifest.validate();
    if (static_cast<int>(labels.size()) != manifest.slice_count)
        throw SliceCountMismatch("label volume holds " + std::to_string(labels.size()) +
                                 " slices, manifest says " + std::to_string(manifest.slice_count));
    for (const auto& s : labels) {
        if (s.width() != manifest.pixel_width || s.height() != manifest.pixel_height)
            throw DimensionMismatch("label slice dimensions differ from manifest");
        for (auto v : s.pixels())
            if (v >= kNumClasses)
                throw Error("label volume contains class code " + std::to_string(int(v)));
    }
}

Mask2D LabelVolume::class_mask(int slice, VoxelClass cls) const {
    const Image8& src = labels.at(slice);
    Mask2D out(src.width(), src.height());
    const auto code = static_cast<std::uint8_t>(cls);
    for (std::size_t i = 0; i < src.size(); ++i)
        out.pixels()[i] = src.pixels()[i] == code ? 1 : 0;
    return out;
}

std::vector<Mask2D> LabelVolume::class_masks(VoxelClass cls) const {
    std::vector<Mask2D> out;
    out.reserve(labels.size());
    for (int k = 0; k < static_cast<int>(labels.size()); ++k)
        out.push_back(class_mask(k, cls));
    return out;
}

Contour::Contour(std::vector<Vec2> points) : points_(std::move(points)) {
    if (points_.size() < 4)
        throw TooFewPoints("contour needs at least 4 points, got " +
                           std::to_string(points_.size()));
    for (const auto& p : points_)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw DegenerateContour("contour has non-finite coordinates");
    if (std::abs(signed_area()) < 1e-12)
        throw DegenerateContour("contour has zero signed area");

    const std::size_t n = points_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = points_[i];
        const Vec2& b = points_[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;  // adjacent edges
            const Vec2& c = points_[j];
            const Vec2& d = points_[(j + 1) % n];
            if (segments_cross(a, b, c, d))
                throw DegenerateContour("contour is self-intersecting");
        }
    }
}

double Contour::signed_area() const {
    const std::size_t n = points_.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = points_[i];
        const Vec2& b = points_[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    return 0.5 * acc;
}

double Contour::area() const { return std::abs(signed_area()); }

double Contour::perimeter() const {
    const std::size_t n = points_.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = points_[i];
        const Vec2& b = points_[(i + 1) % n];
        acc += std::hypot(b.x - a.x, b.y - a.y);
    }
    return acc;
}

Vec2 Contour::centroid() const {
    // Area-weighted centroid of the enclosed region.
    const std::size_t n = points_.size();
    double cx = 0.0, cy = 0.0, a = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = points_[i];
        const Vec2& q = points_[(i + 1) % n];
        const double w = p.x * q.y - q.x * p.y;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
        a += w;
    }
    if (std::abs(a) < 1e-12) {
        // fall back to the vertex mean for (near) degenerate rings
        cx = cy = 0.0;
        for (const auto& p : points_) { cx += p.x; cy += p.y; }
        return {cx / n, cy / n};
    }
    return {cx / (3.0 * a), cy / (3.0 * a)};
}

bool Contour::contains(const Vec2& p) const {
    const std::size_t n = points_.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = points_[i];
        const Vec2& b = points_[j];
        if ((a.y > p.y) != (b.y > p.y) &&
            p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
            inside = !inside;
    }
    return inside;
}

Contour Contour::scaled(double factor) const {
    const Vec2 c = centroid();
    std::vector<Vec2> out;
    out.reserve(points_.size());
    for (const auto& p : points_)
        out.push_back({c.x + (p.x - c.x) * factor, c.y + (p.y - c.y) * factor});
    return Contour(std::move(out));
}

std::size_t VoxelGrid::occupied_count() const {
    std::size_t n = 0;
    for (auto v : occupancy) n += v ? 1 : 0;
    return n;
}

void VoxelGrid::validate() const {
    if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0)
        throw Error("voxel grid dims must be positive");
    for (double s : spacing_mm)
        if (!positive_finite(s)) throw Error("voxel grid spacing must be positive");
    if (occupancy.size() != static_cast<std::size_t>(dims[0]) * dims[1] * dims[2])
        throw DimensionMismatch("voxel grid occupancy size differs from dims");
}

void TriMesh::validate() const {
    for (const auto& t : triangles) {
        for (auto idx : t)
            if (idx >= vertices.size()) throw Error("triangle index out of range");
        const V3& a = vertices[t[0]];
        const V3& b = vertices[t[1]];
        const V3& c = vertices[t[2]];
        const double ux = b.x - a.x, uy = b.y - a.y, uz = b.z - a.z;
        const double vx = c.x - a.x, vy = c.y - a.y, vz = c.z - a.z;
        const double nx = uy * vz - uz * vy;
        const double ny = uz * vx - ux * vz;
        const double nz = ux * vy - uy * vx;
        if (nx * nx + ny * ny + nz * nz <= 0.0)
            throw Error("mesh contains a zero-area triangle");
    }
}

}  // namespace uscan
