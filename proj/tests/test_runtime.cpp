#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "colcheck/evalbench.hpp"
#include "colcheck/runtime.hpp"
#include "test_support.hpp"

using namespace colcheck;

namespace {

SavedModel make_model(const std::string& preset, std::size_t raw_dim, int L,
                      std::uint64_t seed) {
    SavedModel m;
    m.level = EncodingLevel(L);
    m.raw_dim = raw_dim;
    m.params = init_params<float>(preset_spec(preset, encoded_length(raw_dim, m.level)), seed);
    return m;
}

} // namespace

TEST_CASE("polynomial sincos tracks libm across the encoding frequency range") {
    Rng rng(1);
    double max_err_low = 0.0, max_err_high = 0.0;
    for (int it = 0; it < 200000; ++it) {
        // L <= 9 at |theta| <= pi gives |args| <= 2^8 * pi^2 ~ 2527
        const double x = rng.uniform(-2600.0, 2600.0);
        float s, c;
        detail::poly_sincos(static_cast<float>(x), s, c);
        const double es = std::fabs(s - std::sin(static_cast<double>(static_cast<float>(x))));
        const double ec = std::fabs(c - std::cos(static_cast<double>(static_cast<float>(x))));
        if (std::fabs(x) < 32.0)
            max_err_low = std::max({max_err_low, es, ec});
        else
            max_err_high = std::max({max_err_high, es, ec});
    }
    CHECK(max_err_low < 1e-6);
    CHECK(max_err_high < 2e-4); // float argument quantization dominates out here
}

#ifdef COLCHECK_HAVE_AVX2
TEST_CASE("simd sincos lanes equal the scalar twin bit for bit") {
    Rng rng(2);
    float xs[8], s8[8], c8[8];
    for (int it = 0; it < 20000; ++it) {
        for (auto& v : xs) v = static_cast<float>(rng.uniform(-2600.0, 2600.0));
        detail::poly_sincos8(xs, s8, c8);
        for (int l = 0; l < 8; ++l) {
            float s, c;
            detail::poly_sincos(xs[l], s, c);
            CHECK(s == s8[l]);
            CHECK(c == c8[l]);
        }
    }
}
#endif

TEST_CASE("fast_tanh matches libm tanh closely") {
    Rng rng(3);
    double max_err = 0.0;
    for (int it = 0; it < 200000; ++it) {
        const float x = static_cast<float>(rng.uniform(-12.0, 12.0));
        max_err = std::max(max_err,
                           std::fabs(static_cast<double>(detail::fast_tanh(x)) -
                                     std::tanh(static_cast<double>(x))));
    }
    CHECK(max_err < 1e-6);
    CHECK(detail::fast_tanh(100.0f) == doctest::Approx(1.0));
    CHECK(detail::fast_tanh(-100.0f) == doctest::Approx(-1.0));
}

TEST_CASE("NetRuntime matches the exact predictor within float tolerance") {
    for (const char* preset : {"MLP9", "MLP3", "NeRF_MLP_BN"}) {
        CAPTURE(preset);
        const SavedModel model = make_model(preset, 6, 3, 11);
        auto shared = std::make_shared<const SavedModel>(model);
        const ProbFn exact = make_net_predictor(shared);
        NetRuntime rt(model);
        Rng rng(4);
        for (int it = 0; it < 300; ++it) {
            std::vector<double> q(6);
            for (auto& v : q) v = rng.uniform(-M_PI, M_PI);
            const double a = exact(q);
            const double b = rt.predict(q);
            CHECK(std::fabs(a - b) < 2e-4);
        }
    }
}

TEST_CASE("NetRuntime is deterministic and rejects bad widths") {
    const SavedModel model = make_model("MLP9", 6, 9, 5);
    NetRuntime rt(model);
    const std::vector<double> q(6, 0.5);
    const double first = rt.predict(q);
    for (int i = 0; i < 20; ++i) CHECK(rt.predict(q) == first);
    CHECK_THROWS_AS(rt.predict(std::vector<double>(5, 0.0)), DimensionMismatch);
}

TEST_CASE("NetBatchRuntime equals NetRuntime per row for any thread count") {
    const SavedModel model = make_model("MLP9", 6, 3, 7);
    NetRuntime rt(model);
    Rng rng(8);
    Matrix<double> raw(257, 6); // odd size: forces ragged chunking
    for (auto& v : raw.a) v = rng.uniform(-M_PI, M_PI);

    NetBatchRuntime one(model, 1);
    NetBatchRuntime two(model, 2);
    NetBatchRuntime four(model, 4);
    const std::vector<double> p1 = one.infer(raw);
    const std::vector<double> p2 = two.infer(raw);
    const std::vector<double> p4 = four.infer(raw);
    REQUIRE(p1.size() == raw.rows);
    CHECK(p1 == p2);
    CHECK(p1 == p4);
    for (std::size_t i = 0; i < raw.rows; ++i) {
        std::vector<double> q(raw.row(i), raw.row(i) + 6);
        CHECK(p1[i] == doctest::Approx(rt.predict(q)).epsilon(1e-4));
    }
}

TEST_CASE("NetBatchRuntime handles skip connections (NeRF shape)") {
    const SavedModel model = make_model("NeRF", 6, 1, 9);
    auto shared = std::make_shared<const SavedModel>(model);
    const ProbFn exact = make_net_predictor(shared);
    Rng rng(10);
    Matrix<double> raw(64, 6);
    for (auto& v : raw.a) v = rng.uniform(-M_PI, M_PI);
    NetBatchRuntime engine(model, 2);
    const std::vector<double> probs = engine.infer(raw);
    for (std::size_t i = 0; i < raw.rows; ++i) {
        std::vector<double> q(raw.row(i), raw.row(i) + 6);
        CHECK(std::fabs(probs[i] - exact(q)) < 2e-4);
    }
}

TEST_CASE("thread pool runs every task exactly once") {
    ThreadPool pool(3);
    std::vector<std::atomic<int>> hits(1000);
    pool.run(1000, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);
    // reuse across generations
    pool.run(1000, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 2);
}
