#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "colcheck/evalbench.hpp"
#include "test_support.hpp"

using namespace colcheck;

namespace {

ProbFn disc_oracle() {
    return [](const std::vector<double>& x) { return inside_discs_2d(x[0], x[1]) ? 1.0 : 0.0; };
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("evaluate: perfect and constant predictors") {
    const Dataset ds = sample_2d_dataset(2000, 1);
    const Metrics perfect = evaluate(disc_oracle(), ds, Split::test, 2);
    CHECK(perfect.fp == 0);
    CHECK(perfect.fn == 0);
    CHECK(perfect.accuracy() == 1.0);
    CHECK(perfect.total() == ds.count(Split::test));

    const Metrics zero = evaluate([](const std::vector<double>&) { return 0.0; }, ds,
                                  Split::test, 2);
    CHECK(zero.accuracy() == 0.5); // balanced split
    CHECK(zero.tp == 0);
    CHECK(zero.fp == 0);
}

TEST_CASE("evaluate counts match a hand-rolled confusion tally") {
    const Dataset ds = sample_2d_dataset(3000, 2);
    Rng rng(4);
    // seed-fixed pseudo-random predictor, deterministic per feature vector
    const ProbFn noisy = [](const std::vector<double>& x) {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (const double v : x) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, 8);
            h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<double>(h % 1000) / 999.0;
    };
    const Metrics got = evaluate(noisy, ds, Split::train, 2);
    Metrics want;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.split[i] != static_cast<std::uint8_t>(Split::train)) continue;
        std::vector<double> x(ds.features.row(i), ds.features.row(i) + 2);
        const bool pred = noisy(x) >= 0.5;
        const bool truth = ds.labels[i] != 0;
        if (pred && truth) ++want.tp;
        else if (!pred && !truth) ++want.tn;
        else if (pred) ++want.fp;
        else ++want.fn;
    }
    CHECK(got.tp == want.tp);
    CHECK(got.tn == want.tn);
    CHECK(got.fp == want.fp);
    CHECK(got.fn == want.fn);
    CHECK(got.accuracy() ==
          static_cast<double>(want.tp + want.tn) / static_cast<double>(want.total()));
}

TEST_CASE("sweep_L single-L row equals a plain train+evaluate") {
    const Dataset ds = sample_2d_dataset(2000, 3);
    TrainConfig cfg;
    cfg.epochs = 15;
    cfg.seed = 5;
    const SweepResult r = sweep_L("MLP32", ds, {0}, 1, cfg, 2);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].L == 0);
    CHECK(r.rows[0].input_length == 2);
    CHECK(r.rows[0].std_accuracy == 0.0);
    CHECK(r.best_L == 0);

    Matrix<double> xtr_raw, xte_raw, xva_raw;
    std::vector<std::uint8_t> ytr, yte, yva;
    ds.extract(Split::train, xtr_raw, ytr);
    ds.extract(Split::test, xte_raw, yte);
    ds.extract(Split::val, xva_raw, yva);
    const Matrix<float> xtr = encode_batch_f32(xtr_raw, EncodingLevel(0));
    const Matrix<float> xte = encode_batch_f32(xte_raw, EncodingLevel(0));
    const Matrix<float> xva = encode_batch_f32(xva_raw, EncodingLevel(0));
    auto [params, curve] = train(preset_spec("MLP32", 2), xtr, ytr, &xva, &yva, cfg);
    CHECK(r.rows[0].mean_accuracy == accuracy_on(params, xte, yte));
}

TEST_CASE("sweep_L input_length column obeys the encoding law") {
    const Dataset ds = sample_2d_dataset(1500, 4);
    TrainConfig cfg;
    cfg.epochs = 4;
    const SweepResult r = sweep_L("MLP32", ds, {0, 1, 2, 5}, 1, cfg, 2);
    REQUIRE(r.rows.size() == 4);
    for (const auto& row : r.rows)
        CHECK(row.input_length == 2 * (1 + 2 * static_cast<std::size_t>(row.L)));
    const std::string path = "sweep_test.csv";
    write_sweep_csv(r, path);
    const std::string csv = slurp(path);
    CHECK(csv.find("L,mean_accuracy,std_accuracy,input_length") == 0);
    std::remove(path.c_str());
}

TEST_CASE("slice_raster: predictor equal to oracle yields no FP/FN") {
    const ProbFn oracle = disc_oracle(); // domain shifted, but structure is irrelevant here
    const SliceRaster r = slice_raster(oracle, oracle, 2, 0, 1,
                                       std::vector<double>(2, 0.5), 16, 2);
    CHECK(r.counts[static_cast<int>(Cell::FP)] == 0);
    CHECK(r.counts[static_cast<int>(Cell::FN)] == 0);
    CHECK(r.counts[0] + r.counts[1] == 16 * 16);

    // inverted oracle: everything lands in FP/FN
    const ProbFn inverted = [oracle](const std::vector<double>& q) {
        return 1.0 - oracle(q);
    };
    const SliceRaster bad = slice_raster(inverted, oracle, 2, 0, 1,
                                         std::vector<double>(2, 0.5), 16, 2);
    CHECK(bad.counts[static_cast<int>(Cell::TP)] == 0);
    CHECK(bad.counts[static_cast<int>(Cell::TN)] == 0);
}

TEST_CASE("slice_raster categories equal evaluate on the same points") {
    const RobotModel robot = make_desk_arm();
    auto shared = std::make_shared<const RobotModel>(robot);
    const ProbFn oracle = make_oracle_predictor(shared);
    // biased predictor with deterministic structure
    const ProbFn pred = [](const std::vector<double>& q) {
        return q[1] > 0.5 || q[2] < -2.0 ? 1.0 : 0.0;
    };
    const std::size_t res = 24;
    const SliceRaster r =
        slice_raster(pred, oracle, 6, 1, 2, std::vector<double>(6, 0.0), res, 2);

    // package the grid points as a dataset and reuse evaluate as the oracle
    Dataset grid;
    grid.features.resize(res * res, 6);
    grid.labels.resize(res * res);
    grid.split.assign(res * res, static_cast<std::uint8_t>(Split::test));
    const double step = 2.0 * M_PI / res;
    std::size_t k = 0;
    for (std::size_t ib = 0; ib < res; ++ib)
        for (std::size_t ia = 0; ia < res; ++ia, ++k) {
            std::vector<double> q(6, 0.0);
            q[1] = -M_PI + (ia + 0.5) * step;
            q[2] = -M_PI + (ib + 0.5) * step;
            std::copy(q.begin(), q.end(), grid.features.row(k));
            grid.labels[k] = oracle(q) >= 0.5 ? 1 : 0;
        }
    const Metrics m = evaluate(pred, grid, Split::test, 2);
    CHECK(m.tp == r.counts[static_cast<int>(Cell::TP)]);
    CHECK(m.tn == r.counts[static_cast<int>(Cell::TN)]);
    CHECK(m.fp == r.counts[static_cast<int>(Cell::FP)]);
    CHECK(m.fn == r.counts[static_cast<int>(Cell::FN)]);
}

TEST_CASE("slice_raster writes a valid ppm and csv") {
    const ProbFn oracle = disc_oracle();
    const SliceRaster r = slice_raster(oracle, oracle, 2, 0, 1,
                                       std::vector<double>(2, 0.5), 16, 1);
    write_slice_ppm(r, "slice_test.ppm");
    write_slice_csv(r, "slice_test.csv");
    const std::string ppm = slurp("slice_test.ppm");
    CHECK(ppm.substr(0, 3) == "P6\n");
    CHECK(ppm.size() > 16 * 16 * 3);
    const std::string csv = slurp("slice_test.csv");
    CHECK(csv.find("ia,ib,theta_a,theta_b,category") == 0);
    std::remove("slice_test.ppm");
    std::remove("slice_test.csv");
}

TEST_CASE("slice_raster validates arguments") {
    const ProbFn oracle = disc_oracle();
    CHECK_THROWS_AS(slice_raster(oracle, oracle, 2, 0, 1, std::vector<double>(2, 0.0), 8, 1),
                    Error); // resolution < 16
    CHECK_THROWS_AS(slice_raster(oracle, oracle, 2, 1, 1, std::vector<double>(2, 0.0), 16, 1),
                    DimensionMismatch);
}

TEST_CASE("bench_latency reports single and batch rows with finite stats") {
    std::vector<std::vector<double>> queries(1000, std::vector<double>(4, 0.0));
    Rng rng(6);
    for (auto& q : queries)
        for (auto& v : q) v = rng.uniform(-1, 1);
    std::vector<std::uint8_t> truth(queries.size());
    for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = queries[i][0] > 0 ? 1 : 0;

    BenchMethod cheap{"cheap",
                      [](const std::vector<double>& q) { return q[0] > 0 ? 1.0 : 0.0; },
                      [](const Matrix<double>& qs) {
                          std::vector<double> out(qs.rows);
                          for (std::size_t i = 0; i < qs.rows; ++i) out[i] = qs(i, 0) > 0;
                          return out;
                      }};
    const TimingReport r = bench_latency({cheap}, queries, 5, {10, 100}, &truth);
    REQUIRE(r.find("cheap", 1) != nullptr);
    REQUIRE(r.find("cheap", 10) != nullptr);
    REQUIRE(r.find("cheap", 100) != nullptr);
    REQUIRE(r.find("cheap/colliding", 1) != nullptr);
    REQUIRE(r.find("cheap/free", 1) != nullptr);
    for (const auto& row : r.rows) {
        CHECK(std::isfinite(row.mean_ns));
        CHECK(std::isfinite(row.std_ns));
        CHECK(row.samples > 0);
    }
    const std::string path = "timing_test.csv";
    write_timing_csv(r, path);
    CHECK(slurp(path).find("method,batch_size,mean_ns,std_ns,median_rep_ns,samples") == 0);
    std::remove(path.c_str());

    CHECK_THROWS_AS(bench_latency({cheap}, {}, 5, {}), Error);
    CHECK_THROWS_AS(bench_latency({cheap}, queries, 2, {}), Error);
}

TEST_CASE("export_loss_curves: mean and std columns") {
    LossCurve a, b;
    a.train_loss = {1.0, 0.5, 0.25};
    b.train_loss = {2.0, 1.5, 0.75};
    const std::string path = "loss_test.csv";
    export_loss_curves({a, b}, path);
    std::ifstream in(path);
    std::string header, row0;
    std::getline(in, header);
    std::getline(in, row0);
    CHECK(header == "epoch,mean_loss,std_loss");
    CHECK(row0.substr(0, 4) == "0,1.");

    export_loss_curves({a}, path);
    std::ifstream in2(path);
    std::getline(in2, header);
    while (std::getline(in2, row0)) {
        const auto last_comma = row0.rfind(',');
        CHECK(row0.substr(last_comma + 1) == "0"); // single curve: std all zeros
    }
    std::remove(path.c_str());
    CHECK_THROWS_AS(export_loss_curves({}, path), Error);
}

TEST_CASE("train_gap_study: single size, determinism, ascending check") {
    const auto sampler = [](std::size_t n, std::uint64_t seed) {
        return sample_2d_dataset(n, seed);
    };
    TrainConfig cfg;
    cfg.epochs = 8;
    cfg.seed = 2;
    const auto rows = train_gap_study(sampler, "MLP32", EncodingLevel(0), {1200}, 2, cfg, 2);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].size == 1200);
    CHECK(rows[0].mean_gap ==
          doctest::Approx(rows[0].mean_train_accuracy - rows[0].mean_test_accuracy));

    const auto again = train_gap_study(sampler, "MLP32", EncodingLevel(0), {1200}, 2, cfg, 1);
    CHECK(again[0].mean_train_accuracy == rows[0].mean_train_accuracy);
    CHECK(again[0].mean_test_accuracy == rows[0].mean_test_accuracy);

    CHECK_THROWS_AS(train_gap_study(sampler, "MLP32", EncodingLevel(0), {2000, 1000}, 1, cfg, 1),
                    Error);
}

TEST_CASE("encoded-input training drives the loss below raw-input training (2D)") {
    const Dataset ds = sample_2d_dataset(6000, 6);
    Matrix<double> xtr_raw;
    std::vector<std::uint8_t> ytr;
    ds.extract(Split::train, xtr_raw, ytr);
    TrainConfig cfg;
    cfg.epochs = 40;
    auto final_loss = [&](int L, std::uint64_t seed) {
        const Matrix<float> xtr = encode_batch_f32(xtr_raw, EncodingLevel(L));
        TrainConfig c = cfg;
        c.seed = seed;
        auto [params, curve] = train(preset_spec("MLP32", xtr.cols), xtr, ytr,
                                     static_cast<const Matrix<float>*>(nullptr), nullptr, c);
        CHECK(curve.train_loss.back() < curve.train_loss.front());
        return curve.train_loss.back();
    };
    double raw = 0.0, enc = 0.0;
    for (std::uint64_t s = 0; s < 3; ++s) {
        raw += final_loss(0, s);
        enc += final_loss(5, s);
    }
    CHECK(enc < raw);
}

TEST_CASE("training accuracy dominates test accuracy in most seeds") {
    const Dataset ds = sample_2d_dataset(4000, 8);
    Matrix<double> xtr_raw, xte_raw;
    std::vector<std::uint8_t> ytr, yte;
    ds.extract(Split::train, xtr_raw, ytr);
    ds.extract(Split::test, xte_raw, yte);
    const Matrix<float> xtr = encode_batch_f32(xtr_raw, EncodingLevel(3));
    const Matrix<float> xte = encode_batch_f32(xte_raw, EncodingLevel(3));
    int overfit = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        TrainConfig cfg;
        cfg.epochs = 40;
        cfg.seed = seed;
        auto [params, curve] = train(preset_spec("MLP32", xtr.cols), xtr, ytr,
                                     static_cast<const Matrix<float>*>(nullptr), nullptr, cfg);
        overfit += accuracy_on(params, xtr, ytr) >= accuracy_on(params, xte, yte) ? 1 : 0;
    }
    CHECK(overfit >= 4);
}

TEST_CASE("net predictor encodes then forwards, rejecting bad widths") {
    auto model = std::make_shared<SavedModel>();
    model->level = EncodingLevel(2);
    model->raw_dim = 2;
    model->params = init_params<float>(preset_spec("MLP32", encoded_length(2, model->level)), 9);
    const ProbFn fn = make_net_predictor(model);
    const double p = fn({0.3, -0.4});
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    CHECK_THROWS_AS(fn({0.3, -0.4, 0.5}), DimensionMismatch);

    // matches encode + forward done by hand
    const std::vector<double> enc = encode({0.3, -0.4}, model->level);
    const std::vector<float> xf(enc.begin(), enc.end());
    CHECK(p == forward(model->params, xf));

    // batch path agrees with the single-query path
    Matrix<double> raw(8, 2);
    Rng rng(10);
    for (auto& v : raw.a) v = rng.uniform(-1, 1);
    const std::vector<double> probs = predict_batch(*model, raw, 2, 3);
    for (std::size_t i = 0; i < raw.rows; ++i) {
        std::vector<double> q(raw.row(i), raw.row(i) + 2);
        CHECK(fn(q) == doctest::Approx(probs[i]).epsilon(1e-6));
    }
}
