#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "colcheck/dataset.hpp"
#include "colcheck/robot.hpp"
#include "test_support.hpp"

using namespace colcheck;

namespace {

void check_split_contract(const Dataset& ds) {
    std::size_t counts[3][2] = {};
    for (std::size_t i = 0; i < ds.size(); ++i) counts[ds.split[i]][ds.labels[i]]++;
    const std::size_t n = ds.size();
    const std::size_t tr = counts[0][0] + counts[0][1];
    const std::size_t te = counts[1][0] + counts[1][1];
    const std::size_t va = counts[2][0] + counts[2][1];
    CHECK(tr + te + va == n);
    CHECK(std::llabs(static_cast<long long>(tr) - std::llround(0.7 * n)) <= 1);
    CHECK(std::llabs(static_cast<long long>(te) - std::llround(0.2 * n)) <= 1);
    CHECK(std::llabs(static_cast<long long>(va) - std::llround(0.1 * n)) <= 1);
    for (int s = 0; s < 3; ++s) CHECK(counts[s][0] == counts[s][1]); // exact 1:1
}

} // namespace

TEST_CASE("robot dataset: counts, balance, label replay, determinism") {
    const RobotModel robot = make_desk_arm();
    const Dataset ds = sample_robot_dataset(robot, 500, 7, 2);
    CHECK(ds.size() == 1000);
    CHECK(ds.dim() == 6);
    CHECK(ds.count(Split::train) == 700);
    CHECK(ds.count(Split::test) == 200);
    CHECK(ds.count(Split::val) == 100);
    check_split_contract(ds);
    CHECK(ds.meta.source == "robot");
    CHECK(ds.meta.robot_hash == robot_hash_hex(robot));

    // oracle label replay: 100% agreement
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::vector<double> q(ds.features.row(i), ds.features.row(i) + 6);
        for (const double a : q) {
            CHECK(a >= -M_PI);
            CHECK(a <= M_PI);
        }
        CHECK(static_cast<int>(ds.labels[i]) == (self_collision(robot, q) ? 1 : 0));
    }

    // identical for any worker count and across runs
    const Dataset again = sample_robot_dataset(robot, 500, 7, 1);
    CHECK(again.features.a == ds.features.a);
    CHECK(again.labels == ds.labels);
    CHECK(again.split == ds.split);
}

TEST_CASE("robot dataset rejects tiny quotas") {
    const RobotModel robot = make_desk_arm();
    CHECK_THROWS_AS(sample_robot_dataset(robot, 5, 0), Error);
}

TEST_CASE("class starvation triggers on uncollidable geometry") {
    // two tiny boxes 1 m apart can never collide: collision class never fills
    RobotModel m;
    m.name = "separated";
    auto add_link = [&](const std::string& name, TriangleMesh mesh) {
        Link l;
        l.name = name;
        l.mesh = std::move(mesh);
        l.bvh = build_bvh(l.mesh);
        m.links.push_back(std::move(l));
    };
    add_link("a", make_box_mesh(0.01, 0.01, 0.01));
    m.joints.push_back(Joint{{0, 0, 1}, Pose{Mat3::identity(), {0, 0, 0.5}}});
    add_link("b", make_box_mesh(0.01, 0.01, 0.01));
    m.joints.push_back(Joint{{0, 0, 1}, Pose{Mat3::identity(), {0, 0, 0.5}}});
    add_link("c", make_box_mesh(0.01, 0.01, 0.01));
    m.collision_mask = {{0, 2}};
    m.validate();
    CHECK_THROWS_AS(sample_robot_dataset(m, 10, 0, 2), ClassStarvation);
}

TEST_CASE("2d dataset: disc labels, balance, draw-frequency") {
    CHECK(inside_discs_2d(0.5, 0.5));   // inside the r=0.15 disc
    CHECK(!inside_discs_2d(0.0, 1.0));  // outside all discs
    CHECK(inside_discs_2d(0.25, 0.25 + 0.1199));
    CHECK(!inside_discs_2d(0.25, 0.25 + 0.1201));

    const std::size_t n = 100000;
    const Dataset ds = sample_2d_dataset(n, 3);
    check_split_contract(ds);
    CHECK(ds.meta.source == "synthetic2d");
    // kept positives = all positive draws; their frequency tracks the disc area
    const double freq = static_cast<double>(ds.size() / 2) / static_cast<double>(n);
    CHECK(freq > 0.192 - 0.01);
    CHECK(freq < 0.192 + 0.01);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double x = ds.features(i, 0), y = ds.features(i, 1);
        CHECK(static_cast<int>(ds.labels[i]) == (inside_discs_2d(x, y) ? 1 : 0));
    }

    CHECK_THROWS_AS(sample_2d_dataset(50, 0), Error);
}

TEST_CASE("dataset csv round trip is bitwise lossless") {
    const Dataset ds = sample_2d_dataset(2000, 11);
    const std::string path = "dataset_roundtrip_test.csv";
    save_dataset(ds, path);
    const Dataset back = load_dataset(path);
    CHECK(back.features.a == ds.features.a);
    CHECK(back.labels == ds.labels);
    CHECK(back.split == ds.split);
    CHECK(back.meta.d == ds.meta.d);
    CHECK(back.meta.source == ds.meta.source);
    CHECK(back.meta.seed == ds.meta.seed);

    // identical bytes when regenerated with the same seed
    const std::string path2 = "dataset_roundtrip_test2.csv";
    save_dataset(sample_2d_dataset(2000, 11), path2);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    const std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    std::remove(path.c_str());
    std::remove((path + ".meta.json").c_str());
    std::remove(path2.c_str());
    std::remove((path2 + ".meta.json").c_str());
}

TEST_CASE("dataset loader rejects malformed files") {
    const std::string path = "dataset_bad_test.csv";
    {
        std::ofstream out(path);
        out << "";
    }
    CHECK_THROWS_AS(load_dataset(path), FormatError);
    {
        std::ofstream out(path);
        out << "f1,f2,label,split\n0.5,0.5,1\n"; // missing split column
    }
    CHECK_THROWS_AS(load_dataset(path), FormatError);
    {
        std::ofstream out(path);
        out << "f1,f2,label,split\n0.5,0.5,2,train\n"; // bad label
    }
    CHECK_THROWS_AS(load_dataset(path), FormatError);
    {
        std::ofstream out(path);
        out << "a,b\n"; // bad header
    }
    CHECK_THROWS_AS(load_dataset(path), FormatError);
    CHECK_THROWS_AS(load_dataset("no_such_dataset.csv"), IoError);
    std::remove(path.c_str());
}

TEST_CASE("splits are disjoint, exhaustive, and duplicate-free") {
    const Dataset ds = sample_2d_dataset(5000, 5);
    std::set<std::pair<double, double>> seen;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(ds.split[i] <= 2);
        CHECK(seen.insert({ds.features(i, 0), ds.features(i, 1)}).second); // no duplicates
    }
}
