#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "uscan/reconstruct.hpp"

namespace uscan {

namespace {

struct EdgeUse {
    int forward = 0;
    int backward = 0;
};

double tri_area2(const TriMesh& m, const TriMesh::Tri& t) {
    const auto& a = m.vertices[t[0]];
    const auto& b = m.vertices[t[1]];
    const auto& c = m.vertices[t[2]];
    const double ux = b.x - a.x, uy = b.y - a.y, uz = b.z - a.z;
    const double vx = c.x - a.x, vy = c.y - a.y, vz = c.z - a.z;
    const double nx = uy * vz - uz * vy;
    const double ny = uz * vx - ux * vz;
    const double nz = ux * vy - uy * vx;
    return std::sqrt(nx * nx + ny * ny + nz * nz);
}

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

template <typename T>
void write_le(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));  // little-endian host
}

template <typename T>
T read_le(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

void write_stl(const TriMesh& mesh, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("cannot open " + path.string() + " for writing");
    char header[80] = {};
    std::strncpy(header, "binary STL", sizeof(header) - 1);
    os.write(header, sizeof(header));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(mesh.triangles.size()));
    for (const auto& t : mesh.triangles) {
        const auto& a = mesh.vertices[t[0]];
        const auto& b = mesh.vertices[t[1]];
        const auto& c = mesh.vertices[t[2]];
        const double ux = b.x - a.x, uy = b.y - a.y, uz = b.z - a.z;
        const double vx = c.x - a.x, vy = c.y - a.y, vz = c.z - a.z;
        double nx = uy * vz - uz * vy, ny = uz * vx - ux * vz, nz = ux * vy - uy * vx;
        const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
        if (len > 0) { nx /= len; ny /= len; nz /= len; }
        for (double v : {nx, ny, nz}) write_le<float>(os, float(v));
        for (const auto* p : {&a, &b, &c})
            for (double v : {p->x, p->y, p->z}) write_le<float>(os, float(v));
        write_le<std::uint16_t>(os, 0);
    }
    if (!os) throw IoFailure("write failed: " + path.string());
}

TriMesh read_stl(std::ifstream& is, const std::filesystem::path& path) {
    char header[80];
    is.read(header, sizeof(header));
    const auto count = read_le<std::uint32_t>(is);
    TriMesh mesh;
    std::map<std::array<float, 3>, std::uint32_t> dedupe;
    for (std::uint32_t i = 0; i < count; ++i) {
        float buf[12];
        is.read(reinterpret_cast<char*>(buf), sizeof(buf));
        (void)read_le<std::uint16_t>(is);
        if (!is) throw IoFailure("truncated STL: " + path.string());
        TriMesh::Tri tri;
        for (int v = 0; v < 3; ++v) {
            std::array<float, 3> key{buf[3 + 3 * v], buf[4 + 3 * v], buf[5 + 3 * v]};
            auto it = dedupe.find(key);
            if (it == dedupe.end()) {
                it = dedupe.emplace(key, std::uint32_t(mesh.vertices.size())).first;
                mesh.vertices.push_back({key[0], key[1], key[2]});
            }
            tri[v] = it->second;
        }
        mesh.triangles.push_back(tri);
    }
    return mesh;
}

void write_obj(const TriMesh& mesh, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("cannot open " + path.string() + " for writing");
    os << "# triangle mesh, units mm\n";
    char line[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(line, sizeof(line), "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
        os << line;
    }
    for (const auto& t : mesh.triangles)
        os << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    if (!os) throw IoFailure("write failed: " + path.string());
}

TriMesh read_obj(std::ifstream& is, const std::filesystem::path& path) {
    TriMesh mesh;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            TriMesh::V3 v;
            ls >> v.x >> v.y >> v.z;
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::array<long, 3> idx{};
            for (auto& i : idx) {
                std::string tok;
                ls >> tok;
                i = std::strtol(tok.c_str(), nullptr, 10);  // ignore /vt/vn suffixes
            }
            if (!ls && line.find('f') == 0 && idx[2] == 0)
                throw IoFailure("unsupported face record in " + path.string());
            mesh.triangles.push_back({std::uint32_t(idx[0] - 1), std::uint32_t(idx[1] - 1),
                                      std::uint32_t(idx[2] - 1)});
        }
    }
    return mesh;
}

void write_ply(const TriMesh& mesh, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("cannot open " + path.string() + " for writing");
    os << "ply\nformat binary_little_endian 1.0\n"
       << "element vertex " << mesh.vertices.size() << "\n"
       << "property float x\nproperty float y\nproperty float z\n"
       << "element face " << mesh.triangles.size() << "\n"
       << "property list uchar uint vertex_indices\n"
       << "end_header\n";
    for (const auto& v : mesh.vertices)
        for (double c : {v.x, v.y, v.z}) write_le<float>(os, float(c));
    for (const auto& t : mesh.triangles) {
        write_le<std::uint8_t>(os, 3);
        for (auto i : t) write_le<std::uint32_t>(os, i);
    }
    if (!os) throw IoFailure("write failed: " + path.string());
}

TriMesh read_ply(std::ifstream& is, const std::filesystem::path& path) {
    std::string line;
    std::size_t n_vert = 0, n_face = 0;
    bool binary_le = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "format") {
            std::string fmt;
            ls >> fmt;
            binary_le = fmt == "binary_little_endian";
        } else if (tag == "element") {
            std::string what;
            std::size_t count;
            ls >> what >> count;
            if (what == "vertex") n_vert = count;
            else if (what == "face") n_face = count;
        } else if (tag == "end_header") {
            break;
        }
    }
    if (!binary_le) throw IoFailure("only binary little-endian PLY supported: " + path.string());
    TriMesh mesh;
    mesh.vertices.reserve(n_vert);
    for (std::size_t i = 0; i < n_vert; ++i) {
        const float x = read_le<float>(is), y = read_le<float>(is), z = read_le<float>(is);
        mesh.vertices.push_back({x, y, z});
    }
    for (std::size_t i = 0; i < n_face; ++i) {
        const auto n = read_le<std::uint8_t>(is);
        if (n != 3) throw IoFailure("non-triangle face in " + path.string());
        TriMesh::Tri t;
        for (auto& idx : t) idx = read_le<std::uint32_t>(is);
        mesh.triangles.push_back(t);
    }
    if (!is) throw IoFailure("truncated PLY: " + path.string());
    return mesh;
}

}  // namespace

MeshStats mesh_stats(const TriMesh& mesh) {
    mesh.validate();
    MeshStats s;

    std::map<std::pair<std::uint32_t, std::uint32_t>, EdgeUse> edges;
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            const std::uint32_t a = t[e], b = t[(e + 1) % 3];
            auto& use = edges[{std::min(a, b), std::max(a, b)}];
            if (a < b) ++use.forward;
            else ++use.backward;
        }
    }
    s.watertight = !mesh.triangles.empty();
    for (const auto& [k, use] : edges)
        if (use.forward != 1 || use.backward != 1) {
            s.watertight = false;
            break;
        }

    for (const auto& t : mesh.triangles) {
        const auto& a = mesh.vertices[t[0]];
        const auto& b = mesh.vertices[t[1]];
        const auto& c = mesh.vertices[t[2]];
        s.volume_mm3 += (a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x) +
                         a.z * (b.x * c.y - b.y * c.x)) / 6.0;
        s.area_mm2 += 0.5 * tri_area2(mesh, t);
    }

    s.euler_characteristic = long(mesh.vertices.size()) - long(edges.size()) +
                             long(mesh.triangles.size());

    UnionFind uf(mesh.vertices.size());
    for (const auto& t : mesh.triangles) {
        uf.unite(t[0], t[1]);
        uf.unite(t[1], t[2]);
    }
    std::vector<std::uint32_t> roots;
    std::vector<bool> referenced(mesh.vertices.size(), false);
    for (const auto& t : mesh.triangles)
        for (auto i : t) referenced[i] = true;
    for (std::uint32_t i = 0; i < mesh.vertices.size(); ++i)
        if (referenced[i]) roots.push_back(uf.find(i));
    std::sort(roots.begin(), roots.end());
    s.shell_count = int(std::unique(roots.begin(), roots.end()) - roots.begin());

    if (s.watertight && s.volume_mm3 < 0.0)
        throw InconsistentWinding("watertight mesh encloses negative volume");
    return s;
}

void export_mesh(const TriMesh& mesh, MeshFormat format, const std::filesystem::path& path) {
    if (mesh.empty()) throw EmptyMesh("refusing to export an empty mesh");
    mesh.validate();
    switch (format) {
        case MeshFormat::stl_binary: write_stl(mesh, path); break;
        case MeshFormat::obj: write_obj(mesh, path); break;
        case MeshFormat::ply: write_ply(mesh, path); break;
    }
}

TriMesh import_mesh(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoFailure("cannot open " + path.string());
    const std::string ext = path.extension().string();
    if (ext == ".stl") return read_stl(is, path);
    if (ext == ".obj") return read_obj(is, path);
    if (ext == ".ply") return read_ply(is, path);
    throw IoFailure("unknown mesh extension: " + path.string());
}

MeshFormat mesh_format_from_name(const std::string& name) {
    std::string n = name;
    std::transform(n.begin(), n.end(), n.begin(), ::tolower);
    if (n == "stl" || n == "stl-binary" || n == "binary-stl") return MeshFormat::stl_binary;
    if (n == "obj") return MeshFormat::obj;
    if (n == "ply") return MeshFormat::ply;
    throw ConfigInvalid("unknown mesh format: " + name);
}

}  // namespace uscan
