#pragma once

#include <array>
#include <filesystem>

#include "uscan/types.hpp"

namespace uscan {

/// Physical-space grids derived from a label volume: per-class occupancy,
/// the hole-filled full-organ grid F and the resection grid R (R ⊆ F).
struct ComponentGrids {
    VoxelGrid filled;                         // classes {1,2,3}, interior holes closed
    VoxelGrid resection;                      // class 3
    std::array<VoxelGrid, kNumClasses> per_class;
};

ComponentGrids derive_component_grids(const LabelVolume& vol);

/// Extract the closed iso-surface of a binary occupancy grid. Cells are
/// decomposed into six tetrahedra sharing the cube diagonal, which keeps
/// neighboring cells face-consistent and the result watertight; a one
/// voxel zero-pad closes solids that touch the grid boundary. Vertices
/// come out in mm and in canonical (lattice-sorted) order. Throws
/// EmptyGrid when nothing is occupied.
TriMesh marching_cubes(const VoxelGrid& grid, double iso = 0.5);

struct MeshStats {
    double volume_mm3 = 0.0;
    double area_mm2 = 0.0;
    bool watertight = false;
    long euler_characteristic = 0;
    int shell_count = 0;
};

/// Signed volume by the divergence theorem, watertightness as the
/// every-edge-shared-twice-with-opposite-orientation test. Throws
/// InconsistentWinding when a watertight mesh has negative volume.
MeshStats mesh_stats(const TriMesh& mesh);

enum class MeshFormat { stl_binary, obj, ply };

void export_mesh(const TriMesh& mesh, MeshFormat format, const std::filesystem::path& path);
TriMesh import_mesh(const std::filesystem::path& path);

/// Maps "stl" / "obj" / "ply" (case-insensitive) to a format.
MeshFormat mesh_format_from_name(const std::string& name);

}  // namespace uscan
