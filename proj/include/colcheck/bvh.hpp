#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "colcheck/geometry.hpp"

namespace colcheck {

inline constexpr std::uint32_t kBvhLeafSize = 4;
inline constexpr int kBvhMaxDepth = 64;

// Binary tree over mesh triangles. Immutable after build_bvh; concurrent
// read-only queries are safe.
struct Bvh {
    struct Node {
        Aabb aabb;
        // leaf: first/count index into triangle_order; internal: children
        std::uint32_t left = 0;   // internal: left child,  leaf: first
        std::uint32_t right = 0;  // internal: right child, leaf: count
        bool leaf = false;
    };

    std::vector<Node> nodes;                  // nodes[0] is the root
    std::vector<std::uint32_t> triangle_order; // permutation of face indices
    std::size_t triangle_count() const { return triangle_order.size(); }
};

namespace detail {

struct BvhBuilder {
    const TriangleMesh& mesh;
    std::vector<Vec3> centroids;
    std::vector<Aabb> tri_boxes;
    Bvh out;

    explicit BvhBuilder(const TriangleMesh& m) : mesh(m) {
        centroids.reserve(m.face_count());
        tri_boxes.reserve(m.face_count());
        for (std::size_t f = 0; f < m.face_count(); ++f) {
            const Triangle t = m.triangle(f);
            tri_boxes.push_back(triangle_aabb(t));
            centroids.push_back((t.v0 + t.v1 + t.v2) * (1.0 / 3.0));
        }
        out.triangle_order.resize(m.face_count());
        std::iota(out.triangle_order.begin(), out.triangle_order.end(), 0u);
    }

    Aabb range_bounds(std::uint32_t first, std::uint32_t count) const {
        Aabb b;
        for (std::uint32_t i = first; i < first + count; ++i)
            b.extend(tri_boxes[out.triangle_order[i]]);
        return b;
    }

    std::uint32_t build(std::uint32_t first, std::uint32_t count, int depth) {
        const std::uint32_t id = static_cast<std::uint32_t>(out.nodes.size());
        out.nodes.push_back({});
        out.nodes[id].aabb = range_bounds(first, count);

        if (count <= kBvhLeafSize || depth + 1 >= kBvhMaxDepth) {
            out.nodes[id].leaf = true;
            out.nodes[id].left = first;
            out.nodes[id].right = count;
            return id;
        }

        // median split along the longest axis of the centroid bounds;
        // ties broken by lowest triangle index for determinism
        Aabb cb;
        for (std::uint32_t i = first; i < first + count; ++i)
            cb.extend(centroids[out.triangle_order[i]]);
        const int axis = cb.longest_axis();

        // full sort on (centroid, index): a total order, so the layout and the
        // resulting tree are a pure function of the mesh
        auto* base = out.triangle_order.data();
        const std::uint32_t mid = count / 2;
        std::sort(base + first, base + first + count, [&](std::uint32_t a, std::uint32_t b) {
            const double ca = centroids[a][axis], cbv = centroids[b][axis];
            if (ca != cbv) return ca < cbv;
            return a < b;
        });

        const std::uint32_t l = build(first, mid, depth + 1);
        const std::uint32_t r = build(first + mid, count - mid, depth + 1);
        out.nodes[id].left = l;
        out.nodes[id].right = r;
        return id;
    }
};

} // namespace detail

// Deterministic for a given mesh: leaves hold <= kBvhLeafSize triangles.
inline Bvh build_bvh(const TriangleMesh& mesh) {
    if (mesh.face_count() == 0) throw EmptyMesh("build_bvh: mesh has no faces");
    detail::BvhBuilder builder(mesh);
    builder.build(0, static_cast<std::uint32_t>(mesh.face_count()), 0);
    return std::move(builder.out);
}

namespace detail {

// Conservative AABB of a box under a rigid transform.
inline Aabb transform_aabb(const Pose& pose, const Aabb& b) {
    const Vec3 c = pose.apply(b.center());
    const Vec3 h = pose.rotation.cwise_abs() * b.half_extent();
    Aabb r;
    r.min = c - h;
    r.max = c + h;
    return r;
}

struct PairTraversal {
    const TriangleMesh& mesh_a;
    const Bvh& bvh_a;
    const TriangleMesh& mesh_b;
    const Bvh& bvh_b;
    Pose b_to_a; // maps B-local points into A's frame

    bool leaves_collide(const Bvh::Node& na, const Bvh::Node& nb) const {
        for (std::uint32_t i = na.left; i < na.left + na.right; ++i) {
            const Triangle ta = mesh_a.triangle(bvh_a.triangle_order[i]);
            if (ta.is_degenerate()) continue; // zero-area faces are ignored by queries
            for (std::uint32_t j = nb.left; j < nb.left + nb.right; ++j) {
                Triangle tb = mesh_b.triangle(bvh_b.triangle_order[j]);
                if (tb.is_degenerate()) continue;
                tb.v0 = b_to_a.apply(tb.v0);
                tb.v1 = b_to_a.apply(tb.v1);
                tb.v2 = b_to_a.apply(tb.v2);
                if (tri_tri_intersect(ta, tb)) return true;
            }
        }
        return false;
    }

    bool visit(std::uint32_t ia, std::uint32_t ib) const {
        const Bvh::Node& na = bvh_a.nodes[ia];
        const Bvh::Node& nb = bvh_b.nodes[ib];
        if (!aabb_overlap(na.aabb, transform_aabb(b_to_a, nb.aabb))) return false;
        if (na.leaf && nb.leaf) return leaves_collide(na, nb);
        // descend the node with the larger box to keep the recursion balanced
        const Vec3 da = na.aabb.max - na.aabb.min;
        const Vec3 db = nb.aabb.max - nb.aabb.min;
        const bool split_a =
            !na.leaf && (nb.leaf || da.x + da.y + da.z >= db.x + db.y + db.z);
        if (split_a) return visit(na.left, ib) || visit(na.right, ib);
        return visit(ia, nb.left) || visit(ia, nb.right);
    }
};

} // namespace detail

// True iff any triangle of posed A intersects any triangle of posed B.
// Equals the all-pairs brute force exactly (pruning is conservative, the
// narrow phase is tri_tri_intersect on both paths).
inline bool mesh_pair_collide(const TriangleMesh& mesh_a, const Bvh& bvh_a, const Pose& pose_a,
                              const TriangleMesh& mesh_b, const Bvh& bvh_b,
                              const Pose& pose_b) {
    if (bvh_a.triangle_count() != mesh_a.face_count() ||
        bvh_b.triangle_count() != mesh_b.face_count())
        throw MismatchedBvh("mesh_pair_collide: BVH triangle count differs from mesh");
    detail::PairTraversal trav{mesh_a, bvh_a, mesh_b, bvh_b,
                               pose_a.inverse().compose(pose_b)};
    return trav.visit(0, 0);
}

} // namespace colcheck
