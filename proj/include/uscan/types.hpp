#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "uscan/errors.hpp"

namespace uscan {

/// Voxel class codes. The file formats store these raw, so they are a
/// stable contract and must never be renumbered.
enum class VoxelClass : std::uint8_t {
    background = 0,
    peripheral = 1,
    central = 2,
    resection = 3,
};

inline constexpr int kNumClasses = 4;

constexpr const char* class_name(VoxelClass c) {
    switch (c) {
        case VoxelClass::background: return "background";
        case VoxelClass::peripheral: return "peripheral";
        case VoxelClass::central: return "central";
        case VoxelClass::resection: return "resection";
    }
    return "unknown";
}

/// Dense 2D raster, row-major, index = y * width + x.
/// Pixel (x, y) has its center at real coordinate (x, y); contours live
/// in the same coordinate frame.
template <typename T>
class Image2D {
public:
    Image2D() = default;
    Image2D(int width, int height, T fill = T{})
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * height, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    const T& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& pixels() { return data_; }
    const std::vector<T>& pixels() const { return data_; }

    bool operator==(const Image2D&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using Image8 = Image2D<std::uint8_t>;
using ImageF = Image2D<double>;
using Mask2D = Image2D<std::uint8_t>;  // 0 / 1

/// Acquisition geometry of one recorded stack. slice_spacing_mm is
/// redundant with scan_length_mm / slice_count and is validated against
/// it to 1e-9 relative.
struct ScanManifest {
    int slice_count = 0;
    int pixel_width = 0;
    int pixel_height = 0;
    double pixel_size_mm = 0.0;  // isotropic in-plane
    double scan_length_mm = 0.0;
    double slice_spacing_mm = 0.0;
    std::string source_id;
    std::optional<double> dynamic_range_db;

    /// Throws MalformedManifest if any invariant is violated.
    void validate() const;

    static ScanManifest make(int slice_count, int pixel_width, int pixel_height,
                             double pixel_size_mm, double scan_length_mm,
                             std::string source_id,
                             std::optional<double> dynamic_range_db = std::nullopt);

    bool operator==(const ScanManifest&) const = default;
};

/// Ordered grayscale slices plus geometry. Immutable by convention after
/// construction; safe to share across threads.
struct ImageStack {
    ScanManifest manifest;
    std::vector<Image8> slices;

    void validate() const;
};

/// Per-voxel class codes with the same slice layout as ImageStack.
struct LabelVolume {
    ScanManifest manifest;
    std::vector<Image8> labels;  // values in {0,1,2,3}

    void validate() const;

    /// Binary mask of one slice: 1 where the label equals cls.
    Mask2D class_mask(int slice, VoxelClass cls) const;

    /// Binary masks for the whole volume, one per slice.
    std::vector<Mask2D> class_masks(VoxelClass cls) const;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Vec2&) const = default;
};

/// Closed planar polygon in pixel coordinates. Always treated as closed:
/// the segment from points.back() to points.front() is implied.
class Contour {
public:
    Contour() = default;

    /// Validates on construction: at least 4 points, nonzero signed area,
    /// no self-intersection. Throws TooFewPoints / DegenerateContour.
    explicit Contour(std::vector<Vec2> points);

    const std::vector<Vec2>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }

    double signed_area() const;
    double area() const;
    double perimeter() const;
    Vec2 centroid() const;

    /// Even-odd test against the closed polygon.
    bool contains(const Vec2& p) const;

    /// Uniform scale about the centroid.
    Contour scaled(double factor) const;

private:
    std::vector<Vec2> points_;
};

/// Binary occupancy grid in physical space. Index = x + nx*(y + ny*z);
/// voxel (x,y,z) is centered at ((x+.5)sx, (y+.5)sy, (z+.5)sz) mm.
struct VoxelGrid {
    std::array<int, 3> dims{0, 0, 0};
    std::array<double, 3> spacing_mm{0.0, 0.0, 0.0};
    std::vector<std::uint8_t> occupancy;  // 0 / 1

    VoxelGrid() = default;
    VoxelGrid(std::array<int, 3> d, std::array<double, 3> s)
        : dims(d), spacing_mm(s),
          occupancy(static_cast<std::size_t>(d[0]) * d[1] * d[2], 0) {}

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims[1]) * z);
    }
    std::uint8_t at(int x, int y, int z) const { return occupancy[index(x, y, z)]; }
    void set(int x, int y, int z, std::uint8_t v) { occupancy[index(x, y, z)] = v; }

    std::size_t voxel_count() const { return occupancy.size(); }
    std::size_t occupied_count() const;
    double voxel_volume_mm3() const { return spacing_mm[0] * spacing_mm[1] * spacing_mm[2]; }

    void validate() const;

    bool operator==(const VoxelGrid&) const = default;
};

/// Indexed triangle surface in mm, counterclockwise winding seen from
/// outside the enclosed solid.
struct TriMesh {
    struct V3 {
        double x = 0.0, y = 0.0, z = 0.0;
        bool operator==(const V3&) const = default;
    };
    using Tri = std::array<std::uint32_t, 3>;

    std::vector<V3> vertices;
    std::vector<Tri> triangles;

    bool empty() const { return triangles.empty(); }
    void validate() const;  // index range + no zero-area triangles
};

/// Per-frame surgical scores plus their aggregates. The per-frame series
/// covers only frames that contain a resection region.
struct MetricsReport {
    struct FrameScores {
        int slice = 0;
        double circularity = 0.0;
        double smoothness = 0.0;
        double perforation_area_mm2 = 0.0;
        int perforation_sites = 0;
    };
    struct Aggregate {
        double mean = 0.0, std = 0.0, min = 0.0, max = 0.0;
    };

    std::vector<FrameScores> per_frame;
    int skipped_frames = 0;  // frames without resection
    Aggregate circularity, smoothness, perforation_area_mm2, perforation_sites;
};

}  // namespace uscan
