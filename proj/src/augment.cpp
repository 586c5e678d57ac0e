#include "uscan/augment.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace uscan {

namespace {

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

struct FloatGrid {
    std::array<int, 3> dims{0, 0, 0};
    std::vector<float> v;

    FloatGrid() = default;
    explicit FloatGrid(std::array<int, 3> d)
        : dims(d), v(std::size_t(d[0]) * d[1] * d[2], 0.0f) {}

    std::size_t idx(int x, int y, int z) const {
        return std::size_t(x) + std::size_t(dims[0]) * (std::size_t(y) + std::size_t(dims[1]) * z);
    }
    float at(int x, int y, int z) const { return v[idx(x, y, z)]; }
    float& at(int x, int y, int z) { return v[idx(x, y, z)]; }
};

FloatGrid to_float(const VoxelGrid& g) {
    FloatGrid f(g.dims);
    for (std::size_t i = 0; i < g.occupancy.size(); ++i) f.v[i] = g.occupancy[i] ? 1.0f : 0.0f;
    return f;
}

VoxelGrid threshold(const FloatGrid& f, const std::array<double, 3>& spacing) {
    VoxelGrid g(f.dims, spacing);
    for (std::size_t i = 0; i < f.v.size(); ++i) g.occupancy[i] = f.v[i] > 0.5f ? 1 : 0;
    return g;
}

// Box-kernel resample along one axis: each output sample integrates the
// piecewise-constant input over its cell. Exact for both directions.
std::vector<float> box_resample_axis(const std::vector<float>& src, int n_src, int n_dst,
                                     std::size_t stride, std::size_t lines,
                                     std::size_t line_stride) {
    std::vector<float> dst(lines * n_dst);
    const double scale = double(n_src) / double(n_dst);
    for (std::size_t ln = 0; ln < lines; ++ln) {
        for (int i = 0; i < n_dst; ++i) {
            const double a = i * scale;
            const double b = (i + 1) * scale;
            double acc = 0.0;
            int j0 = int(std::floor(a));
            int j1 = int(std::ceil(b));
            j1 = std::min(j1, n_src);
            for (int j = std::max(0, j0); j < j1; ++j) {
                const double lo = std::max(a, double(j));
                const double hi = std::min(b, double(j + 1));
                if (hi > lo) acc += (hi - lo) * src[ln * line_stride + std::size_t(j) * stride];
            }
            dst[ln * n_dst + i] = float(acc / (b - a));
        }
    }
    return dst;
}

// Full 3D box resample; axes processed x, then y, then z with transposes
// folded into index arithmetic.
FloatGrid box_resample(const FloatGrid& src, const std::array<int, 3>& dims) {
    // x pass: lines are (y,z) rows
    FloatGrid rx({dims[0], src.dims[1], src.dims[2]});
    {
        const std::size_t lines = std::size_t(src.dims[1]) * src.dims[2];
        auto out = box_resample_axis(src.v, src.dims[0], dims[0], 1, lines, src.dims[0]);
        rx.v = std::move(out);
    }
    // y pass
    FloatGrid ry({dims[0], dims[1], src.dims[2]});
    for (int z = 0; z < src.dims[2]; ++z) {
        for (int x = 0; x < dims[0]; ++x) {
            std::vector<float> line(src.dims[1]);
            for (int y = 0; y < src.dims[1]; ++y) line[y] = rx.at(x, y, z);
            auto out = box_resample_axis(line, src.dims[1], dims[1], 1, 1, 0);
            for (int y = 0; y < dims[1]; ++y) ry.at(x, y, z) = out[y];
        }
    }
    // z pass
    FloatGrid rz(dims);
    for (int y = 0; y < dims[1]; ++y) {
        for (int x = 0; x < dims[0]; ++x) {
            std::vector<float> line(src.dims[2]);
            for (int z = 0; z < src.dims[2]; ++z) line[z] = ry.at(x, y, z);
            auto out = box_resample_axis(line, src.dims[2], dims[2], 1, 1, 0);
            for (int z = 0; z < dims[2]; ++z) rz.at(x, y, z) = out[z];
        }
    }
    return rz;
}

FloatGrid trilinear_resample(const FloatGrid& src, const std::array<int, 3>& dims) {
    FloatGrid dst(dims);
    auto sample = [&](double x, double y, double z) {
        x = std::clamp(x, 0.0, double(src.dims[0] - 1));
        y = std::clamp(y, 0.0, double(src.dims[1] - 1));
        z = std::clamp(z, 0.0, double(src.dims[2] - 1));
        const int x0 = std::min(int(x), std::max(src.dims[0] - 2, 0));
        const int y0 = std::min(int(y), std::max(src.dims[1] - 2, 0));
        const int z0 = std::min(int(z), std::max(src.dims[2] - 2, 0));
        const int x1 = std::min(x0 + 1, src.dims[0] - 1);
        const int y1 = std::min(y0 + 1, src.dims[1] - 1);
        const int z1 = std::min(z0 + 1, src.dims[2] - 1);
        const double fx = x - x0, fy = y - y0, fz = z - z0;
        auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };
        const double c00 = lerp(src.at(x0, y0, z0), src.at(x1, y0, z0), fx);
        const double c10 = lerp(src.at(x0, y1, z0), src.at(x1, y1, z0), fx);
        const double c01 = lerp(src.at(x0, y0, z1), src.at(x1, y0, z1), fx);
        const double c11 = lerp(src.at(x0, y1, z1), src.at(x1, y1, z1), fx);
        return lerp(lerp(c00, c10, fy), lerp(c01, c11, fy), fz);
    };
    for (int z = 0; z < dims[2]; ++z)
        for (int y = 0; y < dims[1]; ++y)
            for (int x = 0; x < dims[0]; ++x) {
                const double sx = (x + 0.5) * src.dims[0] / double(dims[0]) - 0.5;
                const double sy = (y + 0.5) * src.dims[1] / double(dims[1]) - 0.5;
                const double sz = (z + 0.5) * src.dims[2] / double(dims[2]) - 0.5;
                dst.at(x, y, z) = float(sample(sx, sy, sz));
            }
    return dst;
}

// Seeded lattice value noise in [-1, 1], trilinearly interpolated from a
// random grid with ~4 voxel spacing.
FloatGrid value_noise(const std::array<int, 3>& dims, std::uint64_t seed) {
    constexpr int kCell = 4;
    std::array<int, 3> ldims{dims[0] / kCell + 2, dims[1] / kCell + 2, dims[2] / kCell + 2};
    FloatGrid lattice(ldims);
    std::mt19937_64 rng(seed);
    for (auto& v : lattice.v) v = float(uniform01(rng) * 2.0 - 1.0);

    FloatGrid out(dims);
    for (int z = 0; z < dims[2]; ++z)
        for (int y = 0; y < dims[1]; ++y)
            for (int x = 0; x < dims[0]; ++x) {
                const double gx = double(x) / kCell, gy = double(y) / kCell,
                             gz = double(z) / kCell;
                const int x0 = int(gx), y0 = int(gy), z0 = int(gz);
                const double fx = gx - x0, fy = gy - y0, fz = gz - z0;
                auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };
                const double c00 = lerp(lattice.at(x0, y0, z0), lattice.at(x0 + 1, y0, z0), fx);
                const double c10 = lerp(lattice.at(x0, y0 + 1, z0), lattice.at(x0 + 1, y0 + 1, z0), fx);
                const double c01 = lerp(lattice.at(x0, y0, z0 + 1), lattice.at(x0 + 1, y0, z0 + 1), fx);
                const double c11 = lerp(lattice.at(x0, y0 + 1, z0 + 1), lattice.at(x0 + 1, y0 + 1, z0 + 1), fx);
                out.at(x, y, z) = float(lerp(lerp(c00, c10, fy), lerp(c01, c11, fy), fz));
            }
    return out;
}

// 3x3x3 box blur; gives binary fields the fractional boundary band the
// level noise acts on.
FloatGrid blur3(const FloatGrid& src) {
    FloatGrid out(src.dims);
    const auto [nx, ny, nz] = src.dims;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                double acc = 0.0;
                int n = 0;
                for (int dz = -1; dz <= 1; ++dz)
                    for (int dy = -1; dy <= 1; ++dy)
                        for (int dx = -1; dx <= 1; ++dx) {
                            const int xx = x + dx, yy = y + dy, zz = z + dz;
                            if (xx < 0 || yy < 0 || zz < 0 || xx >= nx || yy >= ny || zz >= nz)
                                continue;
                            acc += src.at(xx, yy, zz);
                            ++n;
                        }
                out.at(x, y, z) = float(acc / n);
            }
    return out;
}

void morph_step(std::vector<std::uint8_t>& occ, const std::array<int, 3>& dims, bool dilate) {
    const auto [nx, ny, nz] = dims;
    std::vector<std::uint8_t> next = occ;
    auto at = [&](int x, int y, int z) -> std::uint8_t {
        if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz) return 0;
        return occ[std::size_t(x) + std::size_t(nx) * (std::size_t(y) + std::size_t(ny) * z)];
    };
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                const std::size_t i =
                    std::size_t(x) + std::size_t(nx) * (std::size_t(y) + std::size_t(ny) * z);
                const bool any = at(x - 1, y, z) || at(x + 1, y, z) || at(x, y - 1, z) ||
                                 at(x, y + 1, z) || at(x, y, z - 1) || at(x, y, z + 1);
                const bool all = at(x - 1, y, z) && at(x + 1, y, z) && at(x, y - 1, z) &&
                                 at(x, y + 1, z) && at(x, y, z - 1) && at(x, y, z + 1);
                if (dilate && !occ[i] && any) next[i] = 1;
                if (!dilate && occ[i] && !all) next[i] = 0;
            }
    occ = std::move(next);
}

// 6-connected components; returns the component mask containing any seed
// voxel, preferring the largest such component.
std::vector<std::uint8_t> component_with_seeds(const std::vector<std::uint8_t>& occ,
                                               const std::array<int, 3>& dims,
                                               const std::vector<std::size_t>& seeds) {
    const auto [nx, ny, nz] = dims;
    const std::size_t total = occ.size();
    std::vector<std::int32_t> label(total, 0);
    std::int32_t next = 0;
    std::vector<std::size_t> stack;
    std::vector<std::size_t> comp_size{0};

    for (std::size_t start = 0; start < total; ++start) {
        if (!occ[start] || label[start]) continue;
        ++next;
        comp_size.push_back(0);
        stack.assign(1, start);
        label[start] = next;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            ++comp_size[next];
            const int x = int(i % nx);
            const int y = int((i / nx) % ny);
            const int z = int(i / (std::size_t(nx) * ny));
            const std::array<std::array<int, 3>, 6> nb{{{x - 1, y, z}, {x + 1, y, z},
                                                        {x, y - 1, z}, {x, y + 1, z},
                                                        {x, y, z - 1}, {x, y, z + 1}}};
            for (const auto& [xx, yy, zz] : nb) {
                if (xx < 0 || yy < 0 || zz < 0 || xx >= nx || yy >= ny || zz >= nz) continue;
                const std::size_t j =
                    std::size_t(xx) + std::size_t(nx) * (std::size_t(yy) + std::size_t(ny) * zz);
                if (!occ[j] || label[j]) continue;
                label[j] = next;
                stack.push_back(j);
            }
        }
    }

    std::vector<std::size_t> seeded_counts(comp_size.size(), 0);
    for (auto s : seeds)
        if (s < total && label[s]) seeded_counts[label[s]] = comp_size[label[s]];
    std::int32_t pick = 0;
    std::size_t best = 0;
    for (std::size_t c = 1; c < seeded_counts.size(); ++c)
        if (seeded_counts[c] > best) { best = seeded_counts[c]; pick = std::int32_t(c); }
    if (pick == 0) {
        // nothing intersects the axis; fall back to the largest component
        for (std::size_t c = 1; c < comp_size.size(); ++c)
            if (comp_size[c] > best) { best = comp_size[c]; pick = std::int32_t(c); }
    }

    std::vector<std::uint8_t> out(total, 0);
    if (pick > 0)
        for (std::size_t i = 0; i < total; ++i) out[i] = label[i] == pick ? 1 : 0;
    return out;
}

}  // namespace

void AugmentConfig::validate() const {
    if (scales < 1) throw ConfigInvalid("augment.scales must be >= 1");
    if (base_resolution < 8) throw ConfigInvalid("augment.base_resolution must be >= 8");
    if (variant_count < 1) throw ConfigInvalid("augment.variant_count must be >= 1");
    if (!(iou_lo > 0.0 && iou_lo < iou_hi && iou_hi <= 1.0))
        throw ConfigInvalid("augment.iou bounds must satisfy 0 < lo < hi <= 1");
    for (double a : noise_amplitude)
        if (a < 0.0) throw ConfigInvalid("augment.noise_amplitude entries must be >= 0");
    for (int r : morph_jitter_radius)
        if (r < 0) throw ConfigInvalid("augment.morph_jitter_radius entries must be >= 0");
    if (allowed_region_margin_mm < 0.0)
        throw ConfigInvalid("augment.allowed_region_margin_mm must be >= 0");
}

VoxelGrid generate_resection_variant(const VoxelGrid& resection, const VoxelGrid& filled,
                                     const VoxelGrid& central, const AugmentConfig& cfg,
                                     int variant_index) {
    cfg.validate();
    resection.validate();
    filled.validate();
    central.validate();
    if (resection.dims != filled.dims || resection.dims != central.dims)
        throw DimensionMismatch("resection/filled/central grids must share dims");
    if (resection.occupied_count() == 0)
        throw EmptyResection("resection grid has no occupied voxels");

    const std::uint64_t master = mix64(cfg.seed, std::uint64_t(variant_index));
    auto level_param = [&](const auto& v, int level, auto fallback) {
        if (v.empty()) return fallback;
        return std::size_t(level) < v.size() ? v[level] : v.back();
    };

    // binary pyramid, coarse (level 0) to fine (level scales-1 == input)
    std::vector<VoxelGrid> pyramid(cfg.scales);
    pyramid[cfg.scales - 1] = resection;
    for (int l = cfg.scales - 2; l >= 0; --l) {
        const auto& finer = pyramid[l + 1];
        const std::array<int, 3> d{std::max(2, (finer.dims[0] + 1) / 2),
                                   std::max(2, (finer.dims[1] + 1) / 2),
                                   std::max(2, (finer.dims[2] + 1) / 2)};
        pyramid[l] = threshold(box_resample(to_float(finer), d), finer.spacing_mm);
        pyramid[l].spacing_mm = {finer.spacing_mm[0] * finer.dims[0] / d[0],
                                 finer.spacing_mm[1] * finer.dims[1] / d[1],
                                 finer.spacing_mm[2] * finer.dims[2] / d[2]};
    }

    VoxelGrid u;  // evolving variant at the current level
    for (int l = 0; l < cfg.scales; ++l) {
        const VoxelGrid& m = pyramid[l];
        if (l == 0) {
            u = m;
        } else {
            // carry the coarse perturbation down as a residual on top of
            // the level's own detail
            const VoxelGrid& prev_m = pyramid[l - 1];
            FloatGrid residual(prev_m.dims);
            for (std::size_t i = 0; i < residual.v.size(); ++i)
                residual.v[i] = float(int(u.occupancy[i]) - int(prev_m.occupancy[i]));
            const FloatGrid up = trilinear_resample(residual, m.dims);
            FloatGrid f = to_float(m);
            for (std::size_t i = 0; i < f.v.size(); ++i) f.v[i] += up.v[i];
            u = threshold(f, m.spacing_mm);
        }

        const double amp = level_param(cfg.noise_amplitude, l, 0.0);
        const int jit = level_param(cfg.morph_jitter_radius, l, 0);
        std::mt19937_64 rng(mix64(master, std::uint64_t(l)));

        if (amp > 0.0) {
            FloatGrid f = blur3(to_float(u));
            const FloatGrid noise = value_noise(u.dims, mix64(master, 0x4007ULL + l));
            for (std::size_t i = 0; i < f.v.size(); ++i)
                f.v[i] += float(amp) * noise.v[i];
            u = threshold(f, u.spacing_mm);
        }
        if (jit > 0) {
            const int k = int(std::floor(uniform01(rng) * (2 * jit + 1))) - jit;
            for (int s = 0; s < std::abs(k); ++s)
                morph_step(u.occupancy, u.dims, k > 0);
        }
    }

    // clamp to the allowed region: central zone grown by the margin,
    // always inside the filled organ
    VoxelGrid allowed = central;
    const std::array<int, 3> margin_r{
        int(std::lround(cfg.allowed_region_margin_mm / central.spacing_mm[0])),
        int(std::lround(cfg.allowed_region_margin_mm / central.spacing_mm[1])),
        int(std::lround(cfg.allowed_region_margin_mm / central.spacing_mm[2]))};
    for (int s = 0; s < std::max({margin_r[0], margin_r[1], margin_r[2]}); ++s)
        morph_step(allowed.occupancy, allowed.dims, true);
    for (std::size_t i = 0; i < allowed.occupancy.size(); ++i)
        allowed.occupancy[i] = allowed.occupancy[i] && filled.occupancy[i];

    for (std::size_t i = 0; i < u.occupancy.size(); ++i)
        u.occupancy[i] = u.occupancy[i] && allowed.occupancy[i];

    // keep the piece that still holds the urethral axis
    std::vector<std::size_t> axis;
    const int cx = resection.dims[0] / 2, cy = resection.dims[1] / 2;
    for (int z = 0; z < resection.dims[2]; ++z)
        if (resection.at(cx, cy, z)) axis.push_back(resection.index(cx, cy, z));
    u.occupancy = component_with_seeds(u.occupancy, u.dims, axis);

    if (u.occupied_count() == 0)
        throw ConstraintCollapse("variant " + std::to_string(variant_index) +
                                 " vanished after constraints");
    u.spacing_mm = resection.spacing_mm;
    return u;
}

VariantModel apply_variant(const VoxelGrid& filled, const VoxelGrid& variant) {
    if (filled.dims != variant.dims)
        throw DimensionMismatch("filled and variant grids must share dims");
    VoxelGrid grid(filled.dims, filled.spacing_mm);
    for (std::size_t i = 0; i < grid.occupancy.size(); ++i)
        grid.occupancy[i] = filled.occupancy[i] && !variant.occupancy[i];
    TriMesh mesh = marching_cubes(grid);
    return {std::move(grid), std::move(mesh)};
}

double grid_iou(const VoxelGrid& a, const VoxelGrid& b) {
    if (a.dims != b.dims) throw DimensionMismatch("grid_iou: dims differ");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.occupancy.size(); ++i) {
        const bool pa = a.occupancy[i], pb = b.occupancy[i];
        inter += pa && pb;
        uni += pa || pb;
    }
    return uni == 0 ? 1.0 : double(inter) / double(uni);
}

VoxelGrid resample_grid(const VoxelGrid& grid, const std::array<int, 3>& dims) {
    grid.validate();
    VoxelGrid out = threshold(box_resample(to_float(grid), dims),
                              {grid.spacing_mm[0] * grid.dims[0] / dims[0],
                               grid.spacing_mm[1] * grid.dims[1] / dims[1],
                               grid.spacing_mm[2] * grid.dims[2] / dims[2]});
    return out;
}

DiversityReport diversity_report(const std::vector<VoxelGrid>& variants,
                                 const VoxelGrid& original, const AugmentConfig& cfg) {
    if (variants.empty()) throw NoVariants("diversity report needs at least one variant");
    DiversityReport rep;
    rep.all_within_bounds = true;
    rep.all_watertight = true;

    for (std::size_t i = 0; i < variants.size(); ++i) {
        DiversityRow row;
        row.variant = int(i);
        row.iou_vs_original = grid_iou(variants[i], original);
        row.within_bounds =
            row.iou_vs_original >= cfg.iou_lo && row.iou_vs_original <= cfg.iou_hi;
        try {
            const TriMesh mesh = marching_cubes(variants[i]);
            row.mesh_watertight = mesh_stats(mesh).watertight;
        } catch (const EmptyGrid&) {
            row.mesh_watertight = false;
        }
        rep.all_within_bounds = rep.all_within_bounds && row.within_bounds;
        rep.all_watertight = rep.all_watertight && row.mesh_watertight;
        rep.rows.push_back(row);
    }

    rep.pairwise_iou.assign(variants.size(), std::vector<double>(variants.size(), 0.0));
    for (std::size_t i = 0; i < variants.size(); ++i)
        for (std::size_t j = i + 1; j < variants.size(); ++j) {
            const double v = grid_iou(variants[i], variants[j]);
            rep.pairwise_iou[i][j] = v;
            rep.max_pairwise_iou = std::max(rep.max_pairwise_iou, v);
        }
    return rep;
}

std::string render_diversity_report(const DiversityReport& report) {
    std::ostringstream os;
    os << "# variant  iou_vs_original  within_bounds  watertight\n";
    for (const auto& r : report.rows)
        os << r.variant << " " << r.iou_vs_original << " " << (r.within_bounds ? 1 : 0) << " "
           << (r.mesh_watertight ? 1 : 0) << "\n";
    os << "max_pairwise_iou " << report.max_pairwise_iou << "\n";
    os << "all_within_bounds " << (report.all_within_bounds ? 1 : 0) << "\n";
    os << "all_watertight " << (report.all_watertight ? 1 : 0) << "\n";
    return os.str();
}

void write_voxel_grid(const VoxelGrid& grid, const std::filesystem::path& path) {
    grid.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("cannot open " + path.string() + " for writing");
    os.write("USVG", 4);
    auto w32 = [&](std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); };
    auto w64f = [&](double v) { os.write(reinterpret_cast<const char*>(&v), 8); };
    w32(1);  // version
    for (int d : grid.dims) w32(std::uint32_t(d));
    for (double s : grid.spacing_mm) w64f(s);
    std::vector<std::uint8_t> packed((grid.occupancy.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < grid.occupancy.size(); ++i)
        if (grid.occupancy[i]) packed[i >> 3] |= std::uint8_t(1u << (i & 7));
    os.write(reinterpret_cast<const char*>(packed.data()),
             std::streamsize(packed.size()));
    if (!os) throw IoFailure("write failed: " + path.string());
}

VoxelGrid read_voxel_grid(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoFailure("cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "USVG", 4) != 0)
        throw IoFailure(path.string() + " is not a voxel grid file");
    auto r32 = [&]() {
        std::uint32_t v;
        is.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    auto r64f = [&]() {
        double v;
        is.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    const std::uint32_t version = r32();
    if (version != 1) throw IoFailure("unsupported voxel grid version");
    VoxelGrid grid;
    for (auto& d : grid.dims) d = int(r32());
    for (auto& s : grid.spacing_mm) s = r64f();
    grid.occupancy.assign(std::size_t(grid.dims[0]) * grid.dims[1] * grid.dims[2], 0);
    std::vector<std::uint8_t> packed((grid.occupancy.size() + 7) / 8, 0);
    is.read(reinterpret_cast<char*>(packed.data()), std::streamsize(packed.size()));
    if (!is) throw IoFailure("truncated voxel grid: " + path.string());
    for (std::size_t i = 0; i < grid.occupancy.size(); ++i)
        grid.occupancy[i] = (packed[i >> 3] >> (i & 7)) & 1;
    grid.validate();
    return grid;
}

}  // namespace uscan
