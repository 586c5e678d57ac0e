#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "uscan/reconstruct.hpp"
#include "uscan/types.hpp"

namespace uscan {

/// Knobs for the coarse-to-fine resection perturbation. Per-scale vectors
/// run coarse to fine and are padded with their last value when shorter
/// than `scales`.
struct AugmentConfig {
    int scales = 6;
    int base_resolution = 128;            // finest grid, per axis
    std::vector<double> noise_amplitude{0.35, 0.30, 0.22, 0.12, 0.05, 0.0};
    std::vector<int> morph_jitter_radius{1, 1, 0, 0, 0, 0};
    double allowed_region_margin_mm = 0.0;
    int variant_count = 20;
    std::uint64_t seed = 0;
    double iou_lo = 0.60;
    double iou_hi = 0.97;

    void validate() const;
};

/// One perturbed resection volume: the original R is pushed through a
/// voxel pyramid, each level adds seeded value noise and random
/// dilation/erosion, and the result is clamped to the allowed region
/// (central zone grown by the margin, inside F) before keeping the
/// component holding the urethral axis. Zero noise and zero jitter
/// reproduce R exactly. Deterministic in (cfg.seed, variant_index).
VoxelGrid generate_resection_variant(const VoxelGrid& resection, const VoxelGrid& filled,
                                     const VoxelGrid& central, const AugmentConfig& cfg,
                                     int variant_index);

/// Boolean-subtract the variant from the filled organ and surface the
/// result. The voxel identity |F\R'| = |F| - |F∩R'| holds exactly.
struct VariantModel {
    VoxelGrid grid;
    TriMesh mesh;
};
VariantModel apply_variant(const VoxelGrid& filled, const VoxelGrid& variant);

struct DiversityRow {
    int variant = 0;
    double iou_vs_original = 0.0;
    bool within_bounds = false;
    bool mesh_watertight = false;
};

struct DiversityReport {
    std::vector<DiversityRow> rows;
    std::vector<std::vector<double>> pairwise_iou;  // upper triangle filled
    double max_pairwise_iou = 0.0;
    bool all_within_bounds = false;
    bool all_watertight = false;
};

/// Scores every variant against the original and each other. Throws
/// NoVariants when the list is empty.
DiversityReport diversity_report(const std::vector<VoxelGrid>& variants,
                                 const VoxelGrid& original, const AugmentConfig& cfg);

std::string render_diversity_report(const DiversityReport& report);

/// Occupancy IoU of two same-shape grids.
double grid_iou(const VoxelGrid& a, const VoxelGrid& b);

/// Resample a grid to the given per-axis resolution (box average +
/// 0.5 threshold), keeping the physical extent.
VoxelGrid resample_grid(const VoxelGrid& grid, const std::array<int, 3>& dims);

/// Bit-packed grid file: magic "USVG", u32 version, u32 dims[3],
/// f64 spacing[3], then occupancy bits LSB-first in x-fastest order.
/// Little-endian throughout.
void write_voxel_grid(const VoxelGrid& grid, const std::filesystem::path& path);
VoxelGrid read_voxel_grid(const std::filesystem::path& path);

}  // namespace uscan
