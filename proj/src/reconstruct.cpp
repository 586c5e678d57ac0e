#include "uscan/reconstruct.hpp"

#include "uscan/image_ops.hpp"

namespace uscan {

ComponentGrids derive_component_grids(const LabelVolume& vol) {
    vol.validate();
    const auto& m = vol.manifest;
    const std::array<int, 3> dims{m.pixel_width, m.pixel_height, m.slice_count};
    const std::array<double, 3> spacing{m.pixel_size_mm, m.pixel_size_mm, m.slice_spacing_mm};

    ComponentGrids out{VoxelGrid(dims, spacing), VoxelGrid(dims, spacing),
                       {VoxelGrid(dims, spacing), VoxelGrid(dims, spacing),
                        VoxelGrid(dims, spacing), VoxelGrid(dims, spacing)}};

    for (int z = 0; z < dims[2]; ++z) {
        const Image8& slice = vol.labels[z];

        Mask2D organ(dims[0], dims[1]);
        for (int y = 0; y < dims[1]; ++y)
            for (int x = 0; x < dims[0]; ++x) {
                const std::uint8_t c = slice.at(x, y);
                out.per_class[c].set(x, y, z, 1);
                if (c != 0) organ.at(x, y) = 1;
                if (c == 3) out.resection.set(x, y, z, 1);
            }

        // close interior background pockets slice by slice
        const Mask2D filled = fill_holes(organ);
        for (int y = 0; y < dims[1]; ++y)
            for (int x = 0; x < dims[0]; ++x)
                if (filled.at(x, y)) out.filled.set(x, y, z, 1);
    }
    return out;
}

}  // namespace uscan
