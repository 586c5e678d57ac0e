#include <algorithm>
#include <cstdint>
#include <unordered_map>

#include "uscan/image_ops.hpp"
#include "uscan/reconstruct.hpp"

namespace uscan {

namespace {

// Six tetrahedra around the main diagonal 000-111 (Freudenthal). Cube
// corners are numbered x + 2y + 4z. Adjacent cubes split shared faces
// along the same diagonal, so the extracted surface matches up across
// cell boundaries.
constexpr int kTets[6][4] = {
    {0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7},
    {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7},
};

constexpr int kCornerOffset[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1},
};

struct Vec3d {
    double x, y, z;
};

Vec3d operator-(const Vec3d& a, const Vec3d& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3d cross(const Vec3d& a, const Vec3d& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double dot(const Vec3d& a, const Vec3d& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

}  // namespace

TriMesh marching_cubes(const VoxelGrid& grid, double iso) {
    grid.validate();
    if (grid.occupied_count() == 0) throw EmptyGrid("no occupied voxels to surface");
    if (iso <= 0.0 || iso >= 1.0) throw Error("iso level must be in (0, 1)");

    const int nx = grid.dims[0], ny = grid.dims[1], nz = grid.dims[2];
    // padded lattice of voxel-center samples; one layer of empty samples
    // around the solid closes boundary-touching surfaces
    const int lx = nx + 2, ly = ny + 2, lz = nz + 2;
    auto sample = [&](int x, int y, int z) -> double {
        const int gx = x - 1, gy = y - 1, gz = z - 1;
        if (gx < 0 || gy < 0 || gz < 0 || gx >= nx || gy >= ny || gz >= nz) return 0.0;
        return grid.at(gx, gy, gz) ? 1.0 : 0.0;
    };
    auto lattice_id = [&](int x, int y, int z) -> std::uint64_t {
        return std::uint64_t(x) + std::uint64_t(lx) * (std::uint64_t(y) + std::uint64_t(ly) * z);
    };
    auto lattice_pos = [&](std::uint64_t id) -> Vec3d {
        const int x = int(id % lx);
        const int y = int((id / lx) % ly);
        const int z = int(id / (std::uint64_t(lx) * ly));
        return {double(x), double(y), double(z)};
    };

    // surface vertices live on lattice edges; key = packed endpoint pair
    struct EdgeKey {
        std::uint64_t a, b;
        bool operator==(const EdgeKey&) const = default;
    };
    struct EdgeHash {
        std::size_t operator()(const EdgeKey& k) const {
            return std::hash<std::uint64_t>()(k.a * 0x9e3779b97f4a7c15ULL ^ k.b);
        }
    };
    std::unordered_map<EdgeKey, std::uint32_t, EdgeHash> vertex_of_edge;
    std::vector<EdgeKey> vertex_keys;
    std::vector<Vec3d> vertex_pos;  // index space, converted to mm at the end
    std::vector<TriMesh::Tri> tris;

    auto edge_vertex = [&](std::uint64_t ia, std::uint64_t ib, double va, double vb) {
        EdgeKey key{std::min(ia, ib), std::max(ia, ib)};
        auto it = vertex_of_edge.find(key);
        if (it != vertex_of_edge.end()) return it->second;
        const Vec3d pa = lattice_pos(ia), pb = lattice_pos(ib);
        // interpolate toward the iso level; binary data lands on midpoints
        double t = (iso - va) / (vb - va);
        if (ia > ib) t = 1.0 - t;  // evaluate along the canonical direction
        const Vec3d pmin = ia < ib ? pa : pb;
        const Vec3d pmax = ia < ib ? pb : pa;
        const Vec3d p{pmin.x + t * (pmax.x - pmin.x), pmin.y + t * (pmax.y - pmin.y),
                      pmin.z + t * (pmax.z - pmin.z)};
        const auto idx = static_cast<std::uint32_t>(vertex_pos.size());
        vertex_of_edge.emplace(key, idx);
        vertex_keys.push_back(key);
        vertex_pos.push_back(p);
        return idx;
    };

    // emit one triangle wound so its normal points away from the inside;
    // `inside_ref` is a point known to be strictly on the solid side
    auto emit = [&](std::uint32_t v0, std::uint32_t v1, std::uint32_t v2,
                    const Vec3d& inside_ref) {
        const Vec3d& a = vertex_pos[v0];
        const Vec3d n = cross(vertex_pos[v1] - a, vertex_pos[v2] - a);
        if (dot(n, inside_ref - a) > 0.0)
            tris.push_back({v0, v2, v1});
        else
            tris.push_back({v0, v1, v2});
    };

    for (int z = 0; z < lz - 1; ++z) {
        for (int y = 0; y < ly - 1; ++y) {
            for (int x = 0; x < lx - 1; ++x) {
                double corner_val[8];
                std::uint64_t corner_id[8];
                int occupied = 0;
                for (int c = 0; c < 8; ++c) {
                    const int cx = x + kCornerOffset[c][0];
                    const int cy = y + kCornerOffset[c][1];
                    const int cz = z + kCornerOffset[c][2];
                    corner_val[c] = sample(cx, cy, cz);
                    corner_id[c] = lattice_id(cx, cy, cz);
                    occupied += corner_val[c] > iso ? 1 : 0;
                }
                if (occupied == 0 || occupied == 8) continue;

                for (const auto& tet : kTets) {
                    int code = 0;
                    for (int i = 0; i < 4; ++i)
                        if (corner_val[tet[i]] > iso) code |= 1 << i;
                    if (code == 0 || code == 15) continue;

                    int in[4], out[4], nin = 0, nout = 0;
                    for (int i = 0; i < 4; ++i) {
                        if (code & (1 << i)) in[nin++] = tet[i];
                        else out[nout++] = tet[i];
                    }
                    auto mid = [&](int a, int b) {
                        return edge_vertex(corner_id[a], corner_id[b],
                                           corner_val[a], corner_val[b]);
                    };

                    if (nin == 1) {
                        const Vec3d ref = lattice_pos(corner_id[in[0]]);
                        emit(mid(in[0], out[0]), mid(in[0], out[1]), mid(in[0], out[2]), ref);
                    } else if (nin == 3) {
                        // single outside corner: same cut, inside is the rest
                        const Vec3d o = lattice_pos(corner_id[out[0]]);
                        const std::uint32_t a = mid(out[0], in[0]);
                        const std::uint32_t b = mid(out[0], in[1]);
                        const std::uint32_t c = mid(out[0], in[2]);
                        // wind against the outside corner: flip the reference test
                        const Vec3d& pa = vertex_pos[a];
                        const Vec3d n = cross(vertex_pos[b] - pa, vertex_pos[c] - pa);
                        if (dot(n, o - pa) > 0.0)
                            tris.push_back({a, b, c});
                        else
                            tris.push_back({a, c, b});
                    } else {  // nin == 2: quad between the two edge pairs
                        const std::uint32_t q0 = mid(in[0], out[0]);
                        const std::uint32_t q1 = mid(in[0], out[1]);
                        const std::uint32_t q2 = mid(in[1], out[1]);
                        const std::uint32_t q3 = mid(in[1], out[0]);
                        const Vec3d pi0 = lattice_pos(corner_id[in[0]]);
                        const Vec3d pi1 = lattice_pos(corner_id[in[1]]);
                        const Vec3d ref{0.5 * (pi0.x + pi1.x), 0.5 * (pi0.y + pi1.y),
                                        0.5 * (pi0.z + pi1.z)};
                        emit(q0, q1, q2, ref);
                        emit(q0, q2, q3, ref);
                    }
                }
            }
        }
    }

    // canonical vertex order: sorted by lattice edge key
    std::vector<std::uint32_t> order(vertex_pos.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return vertex_keys[a].a < vertex_keys[b].a ||
               (vertex_keys[a].a == vertex_keys[b].a && vertex_keys[a].b < vertex_keys[b].b);
    });
    std::vector<std::uint32_t> rank(order.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

    TriMesh mesh;
    mesh.vertices.resize(vertex_pos.size());
    const auto [sx, sy, sz] = grid.spacing_mm;
    for (std::uint32_t i = 0; i < vertex_pos.size(); ++i) {
        const Vec3d& p = vertex_pos[i];
        // lattice index l maps to voxel center (l - 0.5) * spacing
        mesh.vertices[rank[i]] = {(p.x - 0.5) * sx, (p.y - 0.5) * sy, (p.z - 0.5) * sz};
    }
    mesh.triangles.reserve(tris.size());
    for (const auto& t : tris)
        mesh.triangles.push_back({rank[t[0]], rank[t[1]], rank[t[2]]});
    return mesh;
}

}  // namespace uscan
