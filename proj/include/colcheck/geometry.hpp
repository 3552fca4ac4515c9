#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "colcheck/errors.hpp"
#include "colcheck/vec.hpp"

namespace colcheck {

// Shared numeric constants. The brute-force test oracle must use the same
// values so that both checkers agree bit-for-bit on every query.
inline constexpr double kDegenerateAreaEps = 1e-12; // m^2
inline constexpr double kPredicateEps = 1e-9;

struct Triangle {
    Vec3 v0, v1, v2;

    double area() const { return 0.5 * norm(cross(v1 - v0, v2 - v0)); }
    bool is_degenerate() const { return !(area() >= kDegenerateAreaEps); }
};

struct Aabb {
    Vec3 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity()};
    Vec3 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()};

    void extend(const Vec3& p) {
        min = cwise_min(min, p);
        max = cwise_max(max, p);
    }
    void extend(const Aabb& b) {
        min = cwise_min(min, b.min);
        max = cwise_max(max, b.max);
    }
    Vec3 center() const { return (min + max) * 0.5; }
    Vec3 half_extent() const { return (max - min) * 0.5; }
    bool contains(const Aabb& b) const {
        return b.min.x >= min.x && b.min.y >= min.y && b.min.z >= min.z &&
               b.max.x <= max.x && b.max.y <= max.y && b.max.z <= max.z;
    }
    int longest_axis() const {
        const Vec3 d = max - min;
        if (d.x >= d.y && d.x >= d.z) return 0;
        return d.y >= d.z ? 1 : 2;
    }
};

inline Aabb triangle_aabb(const Triangle& t) {
    Aabb b;
    b.extend(t.v0);
    b.extend(t.v1);
    b.extend(t.v2);
    return b;
}

// Closed-interval overlap on all three axes; touching boxes overlap.
inline bool aabb_overlap(const Aabb& a, const Aabb& b) {
    return a.min.x <= b.max.x && b.min.x <= a.max.x &&
           a.min.y <= b.max.y && b.min.y <= a.max.y &&
           a.min.z <= b.max.z && b.min.z <= a.max.z;
}

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> faces;

    std::size_t face_count() const { return faces.size(); }

    Triangle triangle(std::size_t f) const {
        const auto& idx = faces[f];
        return Triangle{vertices[idx[0]], vertices[idx[1]], vertices[idx[2]]};
    }

    Aabb bounds() const {
        Aabb b;
        for (const auto& v : vertices) b.extend(v);
        return b;
    }

    void validate() const {
        if (faces.empty()) throw EmptyMesh("mesh has no faces");
        for (const auto& f : faces)
            for (const auto i : f)
                if (i >= vertices.size())
                    throw FormatError("face index " + std::to_string(i) + " out of range");
        for (const auto& v : vertices)
            if (!is_finite(v)) throw FormatError("non-finite vertex");
    }
};

inline TriangleMesh transformed(const TriangleMesh& mesh, const Pose& pose) {
    TriangleMesh out;
    out.vertices.reserve(mesh.vertices.size());
    for (const auto& v : mesh.vertices) out.vertices.push_back(pose.apply(v));
    out.faces = mesh.faces;
    return out;
}

namespace detail {

// ---- Moller 1997 interval-based triangle-triangle intersection ----
// Closed-set semantics: shared points (touching) count as intersecting.

inline void isect_sort(double& a, double& b) {
    if (a > b) std::swap(a, b);
}

// 2D helpers for the coplanar case, working on the dominant-plane projection.
inline bool edge_edge_2d(const Vec3& v0, const Vec3& v1, const Vec3& u0, const Vec3& u1,
                         int i0, int i1) {
    const double ax = v1[i0] - v0[i0];
    const double ay = v1[i1] - v0[i1];
    const double bx = u0[i0] - u1[i0];
    const double by = u0[i1] - u1[i1];
    const double cx = v0[i0] - u0[i0];
    const double cy = v0[i1] - u0[i1];
    const double f = ay * bx - ax * by;
    const double d = by * cx - bx * cy;
    if ((f > 0 && d >= 0 && d <= f) || (f < 0 && d <= 0 && d >= f)) {
        const double e = ax * cy - ay * cx;
        if (f > 0) {
            if (e >= 0 && e <= f) return true;
        } else {
            if (e <= 0 && e >= f) return true;
        }
    }
    return false;
}

inline bool edge_against_tri_edges_2d(const Vec3& v0, const Vec3& v1, const Vec3& u0,
                                      const Vec3& u1, const Vec3& u2, int i0, int i1) {
    return edge_edge_2d(v0, v1, u0, u1, i0, i1) || edge_edge_2d(v0, v1, u1, u2, i0, i1) ||
           edge_edge_2d(v0, v1, u2, u0, i0, i1);
}

inline bool point_in_tri_2d(const Vec3& p, const Vec3& u0, const Vec3& u1, const Vec3& u2,
                            int i0, int i1) {
    double a = u1[i1] - u0[i1];
    double b = -(u1[i0] - u0[i0]);
    double c = -a * u0[i0] - b * u0[i1];
    const double d0 = a * p[i0] + b * p[i1] + c;

    a = u2[i1] - u1[i1];
    b = -(u2[i0] - u1[i0]);
    c = -a * u1[i0] - b * u1[i1];
    const double d1 = a * p[i0] + b * p[i1] + c;

    a = u0[i1] - u2[i1];
    b = -(u0[i0] - u2[i0]);
    c = -a * u2[i0] - b * u2[i1];
    const double d2 = a * p[i0] + b * p[i1] + c;

    return (d0 >= 0 && d1 >= 0 && d2 >= 0) || (d0 <= 0 && d1 <= 0 && d2 <= 0);
}

inline bool coplanar_tri_tri(const Vec3& n, const Vec3& v0, const Vec3& v1, const Vec3& v2,
                             const Vec3& u0, const Vec3& u1, const Vec3& u2) {
    // project onto the axis-aligned plane that maximizes triangle area
    const double ax = std::fabs(n.x), ay = std::fabs(n.y), az = std::fabs(n.z);
    int i0, i1;
    if (ax > ay) {
        if (ax > az) { i0 = 1; i1 = 2; } else { i0 = 0; i1 = 1; }
    } else {
        if (az > ay) { i0 = 0; i1 = 1; } else { i0 = 0; i1 = 2; }
    }
    if (edge_against_tri_edges_2d(v0, v1, u0, u1, u2, i0, i1)) return true;
    if (edge_against_tri_edges_2d(v1, v2, u0, u1, u2, i0, i1)) return true;
    if (edge_against_tri_edges_2d(v2, v0, u0, u1, u2, i0, i1)) return true;
    if (point_in_tri_2d(v0, u0, u1, u2, i0, i1)) return true;
    if (point_in_tri_2d(u0, v0, v1, v2, i0, i1)) return true;
    return false;
}

// Projects the triangle onto the intersection-line axis and returns the scalar
// interval it occupies. vp* are the axis projections, d* the signed plane
// distances; the vertex lying alone on its side of the plane drives the split.
inline bool compute_intervals(double vp0, double vp1, double vp2, double d0, double d1,
                              double d2, double d0d1, double d0d2, double& isect0,
                              double& isect1) {
    auto isect = [](double vv0, double vv1, double vv2, double dd0, double dd1, double dd2,
                    double& a, double& b) {
        a = vv0 + (vv1 - vv0) * dd0 / (dd0 - dd1);
        b = vv0 + (vv2 - vv0) * dd0 / (dd0 - dd2);
    };
    if (d0d1 > 0.0) {
        // d0, d1 on the same side, d2 on the other (or on the plane)
        isect(vp2, vp0, vp1, d2, d0, d1, isect0, isect1);
    } else if (d0d2 > 0.0) {
        isect(vp1, vp0, vp2, d1, d0, d2, isect0, isect1);
    } else if (d1 * d2 > 0.0 || d0 != 0.0) {
        isect(vp0, vp1, vp2, d0, d1, d2, isect0, isect1);
    } else if (d1 != 0.0) {
        isect(vp1, vp0, vp2, d1, d0, d2, isect0, isect1);
    } else if (d2 != 0.0) {
        isect(vp2, vp0, vp1, d2, d0, d1, isect0, isect1);
    } else {
        return true; // coplanar
    }
    return false;
}

} // namespace detail

// True iff the closed triangles share at least one point. Throws
// DegenerateTriangle if either input has area below kDegenerateAreaEps.
inline bool tri_tri_intersect(const Triangle& ta, const Triangle& tb) {
    if (ta.is_degenerate() || tb.is_degenerate())
        throw DegenerateTriangle("tri_tri_intersect requires non-degenerate triangles");

    const Vec3 &v0 = ta.v0, &v1 = ta.v1, &v2 = ta.v2;
    const Vec3 &u0 = tb.v0, &u1 = tb.v1, &u2 = tb.v2;

    // plane of B: n2 . x + c2 = 0
    const Vec3 n2 = cross(u1 - u0, u2 - u0);
    const double c2 = -dot(n2, u0);
    double dv0 = dot(n2, v0) + c2;
    double dv1 = dot(n2, v1) + c2;
    double dv2 = dot(n2, v2) + c2;
    if (std::fabs(dv0) < kPredicateEps) dv0 = 0.0;
    if (std::fabs(dv1) < kPredicateEps) dv1 = 0.0;
    if (std::fabs(dv2) < kPredicateEps) dv2 = 0.0;
    const double dv0dv1 = dv0 * dv1;
    const double dv0dv2 = dv0 * dv2;
    if (dv0dv1 > 0.0 && dv0dv2 > 0.0) return false; // A strictly on one side of plane B

    // plane of A
    const Vec3 n1 = cross(v1 - v0, v2 - v0);
    const double c1 = -dot(n1, v0);
    double du0 = dot(n1, u0) + c1;
    double du1 = dot(n1, u1) + c1;
    double du2 = dot(n1, u2) + c1;
    if (std::fabs(du0) < kPredicateEps) du0 = 0.0;
    if (std::fabs(du1) < kPredicateEps) du1 = 0.0;
    if (std::fabs(du2) < kPredicateEps) du2 = 0.0;
    const double du0du1 = du0 * du1;
    const double du0du2 = du0 * du2;
    if (du0du1 > 0.0 && du0du2 > 0.0) return false;

    // direction of the intersection line; project on its dominant axis
    const Vec3 dir = cross(n1, n2);
    const double dx = std::fabs(dir.x), dy = std::fabs(dir.y), dz = std::fabs(dir.z);
    int axis = 0;
    if (dy > dx) axis = dz > dy ? 2 : 1;
    else if (dz > dx) axis = 2;

    const double vp0 = v0[axis], vp1 = v1[axis], vp2 = v2[axis];
    const double up0 = u0[axis], up1 = u1[axis], up2 = u2[axis];

    double ia0, ia1, ib0, ib1;
    const bool coplanar_a =
        detail::compute_intervals(vp0, vp1, vp2, dv0, dv1, dv2, dv0dv1, dv0dv2, ia0, ia1);
    if (coplanar_a) return detail::coplanar_tri_tri(n2, v0, v1, v2, u0, u1, u2);
    const bool coplanar_b =
        detail::compute_intervals(up0, up1, up2, du0, du1, du2, du0du1, du0du2, ib0, ib1);
    if (coplanar_b) return detail::coplanar_tri_tri(n1, v0, v1, v2, u0, u1, u2);

    detail::isect_sort(ia0, ia1);
    detail::isect_sort(ib0, ib1);
    return !(ia1 < ib0 || ib1 < ia0); // closed intervals: touching counts
}

// ---------------- mesh file loading (ASCII STL / OBJ) ----------------

inline TriangleMesh load_obj(std::istream& in, const std::string& origin = "<obj>") {
    TriangleMesh mesh;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                throw FormatError(origin + ":" + std::to_string(lineno) + ": malformed vertex");
            mesh.vertices.push_back({x, y, z});
        } else if (tag == "f") {
            std::vector<long> idx;
            std::string tok;
            while (ls >> tok) {
                // accept "i", "i/j", "i/j/k"; only the vertex index is used
                const std::size_t slash = tok.find('/');
                try {
                    idx.push_back(std::stol(tok.substr(0, slash)));
                } catch (const std::exception&) {
                    throw FormatError(origin + ":" + std::to_string(lineno) +
                                      ": malformed face token '" + tok + "'");
                }
            }
            if (idx.size() != 3)
                throw FormatError(origin + ":" + std::to_string(lineno) +
                                  ": only triangle faces are supported (got " +
                                  std::to_string(idx.size()) + " vertices)");
            std::array<std::uint32_t, 3> f{};
            for (int i = 0; i < 3; ++i) {
                const long v = idx[static_cast<std::size_t>(i)];
                if (v < 1 || static_cast<std::size_t>(v) > mesh.vertices.size())
                    throw FormatError(origin + ":" + std::to_string(lineno) +
                                      ": face index out of range");
                f[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(v - 1);
            }
            mesh.faces.push_back(f);
        }
        // other tags (vn, vt, comments, groups) ignored
    }
    if (mesh.faces.empty()) throw FormatError(origin + ": no faces");
    mesh.validate();
    return mesh;
}

inline TriangleMesh load_stl_ascii(std::istream& in, const std::string& origin = "<stl>") {
    TriangleMesh mesh;
    std::string tok;
    if (!(in >> tok) || tok != "solid")
        throw FormatError(origin + ": not an ASCII STL (missing 'solid')");
    std::string rest;
    std::getline(in, rest); // solid name
    while (in >> tok) {
        if (tok == "endsolid") break;
        if (tok != "facet")
            throw FormatError(origin + ": expected 'facet', got '" + tok + "'");
        std::string kw;
        double nx, ny, nz;
        if (!(in >> kw >> nx >> ny >> nz) || kw != "normal")
            throw FormatError(origin + ": malformed facet normal");
        if (!(in >> kw) || kw != "outer") throw FormatError(origin + ": expected 'outer loop'");
        in >> kw; // loop
        std::array<std::uint32_t, 3> f{};
        for (int i = 0; i < 3; ++i) {
            double x, y, z;
            if (!(in >> kw >> x >> y >> z) || kw != "vertex")
                throw FormatError(origin + ": malformed vertex");
            f[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(mesh.vertices.size());
            mesh.vertices.push_back({x, y, z});
        }
        if (!(in >> kw) || kw != "endloop") throw FormatError(origin + ": expected 'endloop'");
        if (!(in >> kw) || kw != "endfacet") throw FormatError(origin + ": expected 'endfacet'");
        mesh.faces.push_back(f);
    }
    if (mesh.faces.empty()) throw FormatError(origin + ": no facets");
    mesh.validate();
    return mesh;
}

inline TriangleMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mesh file: " + path);
    const auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (auto& c : ext) c = static_cast<char>(std::tolower(c));
    if (ext == "obj") return load_obj(in, path);
    if (ext == "stl") return load_stl_ascii(in, path);
    throw FormatError("unsupported mesh extension '" + ext + "' for " + path);
}

inline void save_obj(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write mesh file: " + path);
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
        out << buf;
    }
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    if (!out) throw IoError("write failed: " + path);
}

} // namespace colcheck
