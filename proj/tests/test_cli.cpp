#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// Drives the installed binary end to end through a scratch directory.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "colcheck/dataset.hpp"
#include "colcheck/model_io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kBin = COLCHECK_BIN;

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() / ("colcheck_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Sandbox() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd = kBin + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("full pipeline through the binary") {
    Sandbox sb;
    const std::string robot_dir = sb.path("arm");
    REQUIRE(run("gen-robot --out " + robot_dir) == 0);
    REQUIRE(fs::exists(robot_dir + "/desk_arm.json"));
    REQUIRE(fs::exists(robot_dir + "/manifest.json"));

    const std::string robot = robot_dir + "/desk_arm.json";
    const std::string data2d = sb.path("d2.csv");
    const std::string datar = sb.path("dr.csv");

    SUBCASE("gen-data is balanced and reproducible byte for byte") {
        REQUIRE(run("gen-data --synthetic2d --n-per-class 100 --seed 1 --out " + data2d) == 0);
        const colcheck::Dataset ds = colcheck::load_dataset(data2d);
        CHECK(ds.size() == 200);
        std::size_t ones = 0;
        for (const auto l : ds.labels) ones += l;
        CHECK(ones == 100);

        const std::string again = sb.path("d2_again.csv");
        REQUIRE(run("gen-data --synthetic2d --n-per-class 100 --seed 1 --out " + again) == 0);
        CHECK(slurp(data2d) == slurp(again));

        // manifest exists and carries the seed
        const auto manifest = nlohmann::json::parse(slurp(data2d + ".manifest.json"));
        CHECK(manifest.at("command") == "gen-data");
        CHECK(manifest.at("flags").at("seed") == 1);
        CHECK(manifest.at("tool_version").is_string());
    }

    SUBCASE("missing robot file exits 2 and names the path") {
        const int code = std::system((kBin + " gen-data --robot nowhere.json --out " +
                                      sb.path("x.csv") + " 2> " + sb.path("err.txt") +
                                      " > /dev/null")
                                         .c_str());
        CHECK(WEXITSTATUS(code) == 2);
        CHECK(slurp(sb.path("err.txt")).find("nowhere.json") != std::string::npos);
        CHECK(!fs::exists(sb.path("x.csv")));
    }

    SUBCASE("train, eval, sweep, slice, bench, gap-study") {
        REQUIRE(run("gen-data --synthetic2d --n-per-class 400 --seed 2 --out " + data2d) == 0);
        REQUIRE(run("gen-data --robot " + robot + " --n-per-class 300 --seed 2 --out " + datar) ==
                0);

        // train on 2D with L=1 -> input_dim 6
        const std::string model2d = sb.path("m2.ccm");
        REQUIRE(run("train --data " + data2d + " --arch MLP32 --L 1 --epochs 5 --seed 3 --out " +
                    model2d) == 0);
        const colcheck::SavedModel m2 = colcheck::load_model(model2d);
        CHECK(m2.params.spec.input_dim == 6);
        CHECK(fs::exists(model2d + ".loss.csv"));
        CHECK(fs::exists(model2d + ".manifest.json"));

        // --L 0 keeps the raw width
        const std::string model0 = sb.path("m0.ccm");
        REQUIRE(run("train --data " + datar + " --arch MLP9 --L 0 --epochs 2 --seed 3 --out " +
                    model0) == 0);
        CHECK(colcheck::load_model(model0).params.spec.input_dim == 6);

        // unknown arch is a usage error listing the presets
        const int bad =
            std::system((kBin + " train --data " + data2d + " --arch PERCEPTRON --out " +
                         sb.path("no.ccm") + " 2> " + sb.path("err2.txt") + " > /dev/null")
                            .c_str());
        CHECK(WEXITSTATUS(bad) == 2);
        CHECK(slurp(sb.path("err2.txt")).find("MLP9") != std::string::npos);

        REQUIRE(run("eval --model " + model2d + " --data " + data2d + " --split test --out " +
                    sb.path("metrics.json")) == 0);
        const auto metrics = nlohmann::json::parse(slurp(sb.path("metrics.json")));
        CHECK(metrics.at("samples").get<int>() == 160); // 20% of 800

        REQUIRE(run("sweep --arch MLP32 --data " + data2d +
                    " --L-list 0,1,2,3 --trials 1 --epochs 2 --out " + sb.path("sweep.csv")) ==
                0);
        std::ifstream sw(sb.path("sweep.csv"));
        std::string line;
        int rows = 0;
        while (std::getline(sw, line))
            if (!line.empty()) ++rows;
        CHECK(rows == 5); // header + 4 L values

        const std::string modelr = sb.path("mr.ccm");
        REQUIRE(run("train --data " + datar + " --arch MLP3 --L 1 --epochs 2 --seed 0 --out " +
                    modelr) == 0);
        REQUIRE(run("slice --model " + modelr + " --robot " + robot +
                    " --joints 1,2 --resolution 16 --out " + sb.path("slice")) == 0);
        CHECK(slurp(sb.path("slice.ppm")).substr(0, 3) == "P6\n");
        CHECK(fs::exists(sb.path("slice.csv")));

        REQUIRE(run("bench --models " + modelr + ",oracle --robot " + robot +
                    " --queries 1000 --repetitions 5 --batch-sizes 10 --out " +
                    sb.path("timing.csv")) == 0);
        const std::string timing = slurp(sb.path("timing.csv"));
        CHECK(timing.find("oracle,1,") != std::string::npos);
        CHECK(timing.find("mr,10,") != std::string::npos);

        REQUIRE(run("gap-study --robot " + robot +
                    " --sizes 200,600 --trials 1 --arch MLP32 --L 0 --epochs 2 --out " +
                    sb.path("gap.csv")) == 0);
        std::ifstream gap(sb.path("gap.csv"));
        rows = 0;
        while (std::getline(gap, line))
            if (!line.empty()) ++rows;
        CHECK(rows == 3);
    }

    SUBCASE("usage errors exit 2") {
        CHECK(run("definitely-not-a-command") == 2);
        CHECK(run("train") == 2);                 // missing required flags
        CHECK(run("gen-data --out x.csv") == 2);  // neither --robot nor --synthetic2d
    }
}
