#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "colcheck/bvh.hpp"
#include "colcheck/primitives.hpp"
#include "test_support.hpp"

using namespace colcheck;

namespace {

// walks the tree checking the structural invariants
void check_bvh_invariants(const TriangleMesh& mesh, const Bvh& bvh) {
    REQUIRE(!bvh.nodes.empty());
    std::set<std::uint32_t> seen;
    std::vector<std::pair<std::uint32_t, int>> stack{{0, 0}};
    int max_depth = 0;
    while (!stack.empty()) {
        const auto [id, depth] = stack.back();
        stack.pop_back();
        max_depth = std::max(max_depth, depth);
        const Bvh::Node& n = bvh.nodes[id];
        if (n.leaf) {
            CHECK(n.right >= 1);
            CHECK(n.right <= kBvhLeafSize);
            for (std::uint32_t i = n.left; i < n.left + n.right; ++i) {
                const std::uint32_t tri = bvh.triangle_order[i];
                CHECK(seen.insert(tri).second); // appears in exactly one leaf
                CHECK(n.aabb.contains(triangle_aabb(mesh.triangle(tri))));
            }
        } else {
            CHECK(n.aabb.contains(bvh.nodes[n.left].aabb));
            CHECK(n.aabb.contains(bvh.nodes[n.right].aabb));
            stack.push_back({n.left, depth + 1});
            stack.push_back({n.right, depth + 1});
        }
    }
    CHECK(seen.size() == mesh.face_count());
    CHECK(max_depth <= kBvhMaxDepth);
}

} // namespace

TEST_CASE("build_bvh on a single triangle") {
    TriangleMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    mesh.faces = {{0, 1, 2}};
    const Bvh bvh = build_bvh(mesh);
    REQUIRE(bvh.nodes.size() == 1);
    CHECK(bvh.nodes[0].leaf);
    const Aabb want = triangle_aabb(mesh.triangle(0));
    CHECK(bvh.nodes[0].aabb.min == want.min);
    CHECK(bvh.nodes[0].aabb.max == want.max);
}

TEST_CASE("build_bvh rejects empty meshes") {
    TriangleMesh mesh;
    CHECK_THROWS_AS(build_bvh(mesh), EmptyMesh);
}

TEST_CASE("build_bvh invariants on random meshes") {
    for (const std::size_t faces : {2u, 5u, 100u, 357u}) {
        Rng rng(faces);
        const TriangleMesh mesh = testsupport::random_mesh(rng, faces);
        const Bvh bvh = build_bvh(mesh);
        check_bvh_invariants(mesh, bvh);
        // root box equals mesh box
        CHECK(bvh.nodes[0].aabb.min == mesh.bounds().min);
        CHECK(bvh.nodes[0].aabb.max == mesh.bounds().max);
    }
}

TEST_CASE("build_bvh is deterministic") {
    Rng rng(42);
    const TriangleMesh mesh = testsupport::random_mesh(rng, 128);
    const Bvh a = build_bvh(mesh);
    const Bvh b = build_bvh(mesh);
    REQUIRE(a.triangle_order == b.triangle_order);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].left == b.nodes[i].left);
        CHECK(a.nodes[i].right == b.nodes[i].right);
        CHECK(a.nodes[i].leaf == b.nodes[i].leaf);
    }
}

TEST_CASE("mesh_pair_collide trivial cases") {
    const TriangleMesh cube = make_box_mesh(1, 1, 1);
    const Bvh bvh = build_bvh(cube);
    CHECK(mesh_pair_collide(cube, bvh, Pose::identity(), cube, bvh, Pose::identity()));
    Pose far_away = Pose::identity();
    far_away.translation = {10, 0, 0};
    CHECK(!mesh_pair_collide(cube, bvh, Pose::identity(), cube, bvh, far_away));
}

TEST_CASE("mesh_pair_collide validates bvh/mesh pairing") {
    const TriangleMesh cube = make_box_mesh(1, 1, 1);
    Rng rng(1);
    const TriangleMesh other = testsupport::random_mesh(rng, 30);
    const Bvh cube_bvh = build_bvh(cube);
    const Bvh other_bvh = build_bvh(other);
    CHECK_THROWS_AS(mesh_pair_collide(cube, other_bvh, Pose::identity(), other, cube_bvh,
                                      Pose::identity()),
                    MismatchedBvh);
}

TEST_CASE("mesh_pair_collide equals all-pairs brute force on random scenes") {
    Rng rng(2024);
    int hits = 0;
    for (int it = 0; it < 60; ++it) {
        const std::size_t fa = 5 + rng.below(60);
        const std::size_t fb = 5 + rng.below(60);
        const TriangleMesh a = testsupport::random_mesh(rng, fa);
        const TriangleMesh b = testsupport::random_mesh(rng, fb);
        const Pose pa = testsupport::random_pose(rng, 0.6);
        const Pose pb = testsupport::random_pose(rng, 0.6);
        const bool expect = testsupport::mesh_pair_collide_brute(a, pa, b, pb);
        const bool got = mesh_pair_collide(a, build_bvh(a), pa, b, build_bvh(b), pb);
        CAPTURE(it);
        CHECK(got == expect);
        hits += expect ? 1 : 0;
    }
    CHECK(hits > 5);
    CHECK(hits < 55);
}

TEST_CASE("primitive meshes are valid and sized as documented") {
    const TriangleMesh box = make_box_mesh(0.2, 0.3, 0.4);
    CHECK(box.faces.size() == 12);
    box.validate();
    const TriangleMesh box2 = make_box_mesh(0.2, 0.3, 0.4, 2);
    CHECK(box2.faces.size() == 48);
    const TriangleMesh cyl = make_cylinder_mesh(0.05, 0.2, 24);
    CHECK(cyl.faces.size() == 96);
    cyl.validate();
    for (const auto& t : {box, box2, cyl})
        for (std::size_t f = 0; f < t.face_count(); ++f) CHECK(!t.triangle(f).is_degenerate());
}
