#pragma once

#include <cmath>

#include "colcheck/geometry.hpp"

namespace colcheck {

// Axis-aligned box spanning [-sx/2, sx/2] x [-sy/2, sy/2] x [0, sz]; each face
// split into subdiv x subdiv quads. subdiv=1 gives the minimal 12-triangle box.
inline TriangleMesh make_box_mesh(double sx, double sy, double sz, int subdiv = 1) {
    TriangleMesh mesh;
    const double hx = sx * 0.5, hy = sy * 0.5;
    auto add_face = [&](const Vec3& origin, const Vec3& du, const Vec3& dv) {
        // grid of (subdiv+1)^2 vertices, outward winding left to the caller
        const std::uint32_t base = static_cast<std::uint32_t>(mesh.vertices.size());
        for (int i = 0; i <= subdiv; ++i)
            for (int j = 0; j <= subdiv; ++j)
                mesh.vertices.push_back(origin + du * (static_cast<double>(i) / subdiv) +
                                        dv * (static_cast<double>(j) / subdiv));
        const auto vid = [&](int i, int j) {
            return base + static_cast<std::uint32_t>(i * (subdiv + 1) + j);
        };
        for (int i = 0; i < subdiv; ++i)
            for (int j = 0; j < subdiv; ++j) {
                mesh.faces.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
                mesh.faces.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
            }
    };
    const Vec3 ex{sx, 0, 0}, ey{0, sy, 0}, ez{0, 0, sz};
    add_face({-hx, -hy, 0}, ey, ex);  // bottom (z=0)
    add_face({-hx, -hy, sz}, ex, ey); // top
    add_face({-hx, -hy, 0}, ex, ez);  // y = -hy
    add_face({-hx, hy, 0}, ez, ex);   // y = +hy
    add_face({-hx, -hy, 0}, ez, ey);  // x = -hx
    add_face({hx, -hy, 0}, ey, ez);   // x = +hx
    return mesh;
}

// Closed cylinder of radius r, height h, axis +z, base at z=0.
// Triangle count: 4 * segments (2 per side quad, 1 per cap fan each end).
inline TriangleMesh make_cylinder_mesh(double r, double h, int segments = 16) {
    TriangleMesh mesh;
    const std::uint32_t n = static_cast<std::uint32_t>(segments);
    for (std::uint32_t i = 0; i < n; ++i) {
        const double a = 2.0 * M_PI * static_cast<double>(i) / n;
        mesh.vertices.push_back({r * std::cos(a), r * std::sin(a), 0.0});
        mesh.vertices.push_back({r * std::cos(a), r * std::sin(a), h});
    }
    const std::uint32_t bottom_c = static_cast<std::uint32_t>(mesh.vertices.size());
    mesh.vertices.push_back({0, 0, 0});
    const std::uint32_t top_c = bottom_c + 1;
    mesh.vertices.push_back({0, 0, h});
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t j = (i + 1) % n;
        const std::uint32_t b0 = 2 * i, t0 = 2 * i + 1, b1 = 2 * j, t1 = 2 * j + 1;
        mesh.faces.push_back({b0, b1, t1});
        mesh.faces.push_back({b0, t1, t0});
        mesh.faces.push_back({bottom_c, b1, b0});
        mesh.faces.push_back({top_c, t0, t1});
    }
    return mesh;
}

} // namespace colcheck
