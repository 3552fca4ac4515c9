#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "colcheck/encoding.hpp"
#include "colcheck/model_io.hpp"
#include "colcheck/rng.hpp"

using namespace colcheck;

namespace {

SavedModel make_test_model(const std::string& preset, std::size_t raw_dim, int L,
                           std::uint64_t seed) {
    SavedModel m;
    m.level = EncodingLevel(L);
    m.raw_dim = raw_dim;
    m.params = init_params<float>(preset_spec(preset, encoded_length(raw_dim, m.level)), seed);
    return m;
}

} // namespace

TEST_CASE("model save/load round trip is bit exact") {
    for (const char* preset : {"MLP3", "NeRF", "NeRF_MLP_BN"}) {
        CAPTURE(preset);
        const SavedModel m = make_test_model(preset, 6, 2, 77);
        const std::string path = std::string("model_roundtrip_") + preset + ".ccm";
        save_model(m, path);
        const SavedModel back = load_model(path);
        CHECK(back.level.L == m.level.L);
        CHECK(back.raw_dim == m.raw_dim);
        CHECK(back.params.spec.preset == m.params.spec.preset);
        REQUIRE(back.params.layers.size() == m.params.layers.size());
        for (std::size_t l = 0; l < m.params.layers.size(); ++l) {
            CHECK(back.params.layers[l].w.a == m.params.layers[l].w.a);
            CHECK(back.params.layers[l].b == m.params.layers[l].b);
            CHECK(back.params.layers[l].bn.gamma == m.params.layers[l].bn.gamma);
            CHECK(back.params.layers[l].bn.run_var == m.params.layers[l].bn.run_var);
        }
        std::remove(path.c_str());
    }
}

TEST_CASE("round-tripped model reproduces forward outputs exactly") {
    const SavedModel m = make_test_model("NeRF_MLP", 6, 3, 5);
    const std::string path = "model_forward_roundtrip.ccm";
    save_model(m, path);
    const SavedModel back = load_model(path);
    Rng rng(9);
    for (int it = 0; it < 100; ++it) {
        std::vector<double> raw(6);
        for (auto& v : raw) v = rng.uniform(-M_PI, M_PI);
        const std::vector<double> enc = encode(raw, m.level);
        const std::vector<float> x(enc.begin(), enc.end());
        CHECK(forward(m.params, x) == forward(back.params, x));
    }
    std::remove(path.c_str());
}

TEST_CASE("truncated model file raises FormatError") {
    const SavedModel m = make_test_model("MLP3", 6, 1, 3);
    const std::string path = "model_truncated.ccm";
    save_model(m, path);
    std::ifstream in(path);
    std::string line, kept;
    int lines = 0;
    while (std::getline(in, line) && lines < 3) {
        kept += line + "\n";
        ++lines;
    }
    in.close();
    std::ofstream out(path);
    out << kept;
    out.close();
    CHECK_THROWS_AS(load_model(path), FormatError);
    std::remove(path.c_str());
}

TEST_CASE("corrupted base64 or header raises FormatError") {
    const SavedModel m = make_test_model("MLP3", 6, 0, 3);
    const std::string path = "model_corrupt.ccm";
    save_model(m, path);
    {
        std::ifstream in(path);
        std::string header, tensor;
        std::getline(in, header);
        std::getline(in, tensor);
        in.close();
        std::ofstream out(path);
        out << header << "\n" << "!!!not-base64!!!" << "\n";
    }
    CHECK_THROWS_AS(load_model(path), FormatError);

    {
        std::ofstream out(path);
        out << "{\"format_version\": 999}\n";
    }
    CHECK_THROWS_AS(load_model(path), FormatError);

    {
        std::ofstream out(path);
        out << "";
    }
    CHECK_THROWS_AS(load_model(path), FormatError);
    std::remove(path.c_str());
}

TEST_CASE("model with L=3 refuses raw 6-wide inference") {
    const SavedModel m = make_test_model("MLP3", 6, 3, 3);
    CHECK(m.params.spec.input_dim == 42);
    CHECK_THROWS_AS(forward(m.params, std::vector<float>(6, 0.0f)), DimensionMismatch);
}

TEST_CASE("missing file raises IoError") {
    CHECK_THROWS_AS(load_model("no_such_model.ccm"), IoError);
}

TEST_CASE("base64 round trip including padding variants") {
    Rng rng(13);
    for (const std::size_t n : {0u, 1u, 2u, 3u, 4u, 17u, 100u}) {
        std::vector<float> v(n);
        for (auto& f : v) f = static_cast<float>(rng.uniform(-10, 10));
        const std::string s = detail::floats_to_b64(v);
        const std::vector<float> back = detail::b64_to_floats(s, n);
        CHECK(back == v);
    }
    CHECK_THROWS_AS(detail::base64_decode("abc"), FormatError);     // bad length
    CHECK_THROWS_AS(detail::base64_decode("a==="), FormatError);    // bad padding
    CHECK_THROWS_AS(detail::base64_decode("ab=c"), FormatError);    // data after padding
}
