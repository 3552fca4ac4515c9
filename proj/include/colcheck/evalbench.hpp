#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "colcheck/dataset.hpp"
#include "colcheck/encoding.hpp"
#include "colcheck/errors.hpp"
#include "colcheck/model_io.hpp"
#include "colcheck/nn.hpp"
#include "colcheck/robot.hpp"
#include "colcheck/threading.hpp"

namespace colcheck {

// P(class 1) from raw (pre-encoding) features.
using ProbFn = std::function<double(const std::vector<double>&)>;

struct Metrics {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
    double accuracy() const {
        return total() == 0 ? 0.0
                            : static_cast<double>(tp + tn) / static_cast<double>(total());
    }
};

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// population standard deviation
inline double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (const double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Confusion counts of a thresholded predictor (p >= 0.5 -> class 1) over one
// dataset split. Chunked in parallel with a deterministic ordered reduction.
inline Metrics evaluate(const ProbFn& predictor, const Dataset& ds, Split split,
                        unsigned threads = 1) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (ds.split[i] == static_cast<std::uint8_t>(split)) idx.push_back(i);
    std::vector<Metrics> partial(idx.empty() ? 1 : std::min<std::size_t>(idx.size(), threads));
    const unsigned nt = static_cast<unsigned>(partial.size());
    parallel_for(idx.size(), nt, [&](std::size_t b, std::size_t e) {
        // recover the chunk id from the partition layout
        const std::size_t chunk = (idx.size() + nt - 1) / nt;
        Metrics& m = partial[b / chunk];
        std::vector<double> x(ds.dim());
        for (std::size_t k = b; k < e; ++k) {
            const std::size_t i = idx[k];
            std::copy(ds.features.row(i), ds.features.row(i) + ds.dim(), x.begin());
            const bool pred = predictor(x) >= 0.5;
            const bool truth = ds.labels[i] != 0;
            if (pred && truth) ++m.tp;
            else if (!pred && !truth) ++m.tn;
            else if (pred && !truth) ++m.fp;
            else ++m.fn;
        }
    });
    Metrics out;
    for (const auto& m : partial) {
        out.tp += m.tp;
        out.tn += m.tn;
        out.fp += m.fp;
        out.fn += m.fn;
    }
    return out;
}

// ---------------- predictors ----------------

// Wraps a trained model: encode with the model's L, then forward in float32.
inline ProbFn make_net_predictor(std::shared_ptr<const SavedModel> model) {
    return [model](const std::vector<double>& raw) {
        if (raw.size() != model->raw_dim)
            throw DimensionMismatch("net predictor: got " + std::to_string(raw.size()) +
                                    " features, model expects raw_dim " +
                                    std::to_string(model->raw_dim));
        const std::vector<double> enc = encode(raw, model->level);
        std::vector<float> xf(enc.begin(), enc.end());
        return forward(model->params, xf);
    };
}

inline ProbFn make_oracle_predictor(std::shared_ptr<const RobotModel> robot) {
    return [robot](const std::vector<double>& q) {
        return self_collision(*robot, q) ? 1.0 : 0.0;
    };
}

// Bulk inference: encode a raw-feature matrix and run batched forward passes,
// optionally split across threads. Returns P(class 1) per row.
inline std::vector<double> predict_batch(const SavedModel& model, const Matrix<double>& raw,
                                         unsigned threads = 1, std::size_t chunk = 1024) {
    if (raw.cols != model.raw_dim)
        throw DimensionMismatch("predict_batch: feature width mismatch");
    std::vector<double> probs(raw.rows);
    const std::size_t n_chunks = (raw.rows + chunk - 1) / chunk;
    parallel_tasks(n_chunks, threads, [&](std::size_t ci) {
        const std::size_t b = ci * chunk, e = std::min(raw.rows, b + chunk);
        Matrix<double> slice(e - b, raw.cols);
        std::copy(raw.row(b), raw.row(b) + (e - b) * raw.cols, slice.a.begin());
        const Matrix<float> enc = encode_batch_f32(slice, model.level);
        Matrix<float> probs_f = forward_batch(model.params, enc);
        for (std::size_t i = b; i < e; ++i) probs[i] = probs_f(i - b, 0);
    });
    return probs;
}

// ---------------- L sweep ----------------

struct SweepRow {
    int L = 0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    std::size_t input_length = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    int best_L = 0;
};

// Trains `trials` seeds per L value and scores test-split accuracy. Trials are
// distributed over worker threads; each (L, trial) cell is self-contained.
inline SweepResult sweep_L(const std::string& arch, const Dataset& ds,
                           const std::vector<int>& l_values, std::size_t trials,
                           const TrainConfig& base_cfg, unsigned threads = 1) {
    if (l_values.empty()) throw Error("sweep_L: need at least one L value");
    if (trials < 1) throw Error("sweep_L: trials must be >= 1");

    Matrix<double> xtr_raw, xte_raw, xva_raw;
    std::vector<std::uint8_t> ytr, yte, yva;
    ds.extract(Split::train, xtr_raw, ytr);
    ds.extract(Split::test, xte_raw, yte);
    ds.extract(Split::val, xva_raw, yva);

    std::vector<std::vector<double>> acc(l_values.size(),
                                         std::vector<double>(trials, 0.0));
    parallel_tasks(l_values.size() * trials, threads, [&](std::size_t cell) {
        const std::size_t li = cell / trials, trial = cell % trials;
        const EncodingLevel level(l_values[li]);
        const Matrix<float> xtr = encode_batch_f32(xtr_raw, level);
        const Matrix<float> xte = encode_batch_f32(xte_raw, level);
        const Matrix<float> xva = encode_batch_f32(xva_raw, level);
        NetworkSpec spec = preset_spec(arch, xtr.cols);
        TrainConfig cfg = base_cfg;
        cfg.seed = base_cfg.seed + trial;
        auto [params, curve] = train(spec, xtr, ytr, &xva, &yva, cfg);
        acc[li][trial] = accuracy_on(params, xte, yte);
    });

    SweepResult result;
    double best = -1.0;
    for (std::size_t li = 0; li < l_values.size(); ++li) {
        SweepRow row;
        row.L = l_values[li];
        row.mean_accuracy = mean_of(acc[li]);
        row.std_accuracy = std_of(acc[li]);
        row.input_length = encoded_length(ds.dim(), EncodingLevel(row.L));
        result.rows.push_back(row);
        if (row.mean_accuracy > best) {
            best = row.mean_accuracy;
            result.best_L = row.L;
        }
    }
    return result;
}

inline void write_sweep_csv(const SweepResult& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write sweep csv: " + path);
    out << "L,mean_accuracy,std_accuracy,input_length\n";
    char buf[128];
    for (const auto& row : r.rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%zu\n", row.L, row.mean_accuracy,
                      row.std_accuracy, row.input_length);
        out << buf;
    }
}

// ---------------- configuration-space slice raster ----------------

enum class Cell : std::uint8_t { TP = 0, TN = 1, FP = 2, FN = 3 };

struct SliceRaster {
    std::size_t resolution = 0;
    std::size_t joint_a = 0, joint_b = 0;
    std::vector<Cell> cells; // row-major, row = b index (low angle first)
    std::size_t counts[4] = {0, 0, 0, 0};

    Cell at(std::size_t ia, std::size_t ib) const { return cells[ib * resolution + ia]; }
};

// Grid over [-pi, pi]^2 for joints (ja, jb) with the remaining features held
// at `fixed`; each cell centre is scored by predictor vs oracle.
inline SliceRaster slice_raster(const ProbFn& predictor, const ProbFn& oracle, std::size_t d,
                                std::size_t ja, std::size_t jb, std::vector<double> fixed,
                                std::size_t resolution, unsigned threads = 1) {
    if (resolution < 16) throw Error("slice_raster: resolution must be >= 16");
    if (ja == jb || ja >= d || jb >= d)
        throw DimensionMismatch("slice_raster: joint indices out of range or equal");
    if (fixed.size() != d) throw DimensionMismatch("slice_raster: fixed vector must have size d");

    SliceRaster r;
    r.resolution = resolution;
    r.joint_a = ja;
    r.joint_b = jb;
    r.cells.assign(resolution * resolution, Cell::TN);
    const double step = 2.0 * M_PI / static_cast<double>(resolution);
    parallel_for(resolution, threads, [&](std::size_t rb, std::size_t re) {
        std::vector<double> q = fixed;
        for (std::size_t ib = rb; ib < re; ++ib) {
            q[jb] = -M_PI + (static_cast<double>(ib) + 0.5) * step;
            for (std::size_t ia = 0; ia < resolution; ++ia) {
                q[ja] = -M_PI + (static_cast<double>(ia) + 0.5) * step;
                const bool pred = predictor(q) >= 0.5;
                const bool truth = oracle(q) >= 0.5;
                Cell c;
                if (pred && truth) c = Cell::TP;
                else if (!pred && !truth) c = Cell::TN;
                else if (pred && !truth) c = Cell::FP;
                else c = Cell::FN;
                r.cells[ib * resolution + ia] = c;
            }
        }
    });
    for (const Cell c : r.cells) ++r.counts[static_cast<int>(c)];
    return r;
}

// Binary PPM, one pixel per cell: TP blue, TN green, FP orange, FN red.
inline void write_slice_ppm(const SliceRaster& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write ppm: " + path);
    static constexpr unsigned char palette[4][3] = {
        {41, 98, 255},  // TP
        {67, 160, 71},  // TN
        {255, 152, 0},  // FP
        {229, 57, 53},  // FN
    };
    out << "P6\n" << r.resolution << ' ' << r.resolution << "\n255\n";
    // image rows top-down = high joint_b angle first
    for (std::size_t ib = r.resolution; ib-- > 0;) {
        for (std::size_t ia = 0; ia < r.resolution; ++ia) {
            const auto& rgb = palette[static_cast<int>(r.at(ia, ib))];
            out.write(reinterpret_cast<const char*>(rgb), 3);
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

inline void write_slice_csv(const SliceRaster& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write slice csv: " + path);
    static constexpr const char* names[4] = {"TP", "TN", "FP", "FN"};
    out << "ia,ib,theta_a,theta_b,category\n";
    const double step = 2.0 * M_PI / static_cast<double>(r.resolution);
    char buf[128];
    for (std::size_t ib = 0; ib < r.resolution; ++ib)
        for (std::size_t ia = 0; ia < r.resolution; ++ia) {
            const double ta = -M_PI + (static_cast<double>(ia) + 0.5) * step;
            const double tb = -M_PI + (static_cast<double>(ib) + 0.5) * step;
            std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%s\n", ia, ib, ta, tb,
                          names[static_cast<int>(r.at(ia, ib))]);
            out << buf;
        }
}

// ---------------- latency benchmarking ----------------

struct BenchMethod {
    std::string name;
    std::function<double(const std::vector<double>&)> single;
    // optional bulk path; returns P(class 1) per row
    std::function<std::vector<double>(const Matrix<double>&)> batch;
};

struct TimingRow {
    std::string method;
    std::size_t batch_size = 1;
    double mean_ns = 0.0;
    double std_ns = 0.0;
    double median_rep_ns = 0.0; // median over per-repetition means
    std::size_t samples = 0;
};

struct TimingReport {
    std::vector<TimingRow> rows;

    const TimingRow* find(const std::string& method, std::size_t batch_size = 1) const {
        for (const auto& r : rows)
            if (r.method == method && r.batch_size == batch_size) return &r;
        return nullptr;
    }
};

inline constexpr std::size_t kBenchWarmup = 100;

// Wall-clock per-query latency with a monotonic clock. Single-query timing runs
// on the calling thread only; the batch path is whatever the method provides
// (which may parallelize internally). When `truth` labels are supplied, each
// method also gets rows for the colliding / collision-free query subsets.
inline TimingReport bench_latency(const std::vector<BenchMethod>& methods,
                                  const std::vector<std::vector<double>>& queries,
                                  std::size_t repetitions,
                                  const std::vector<std::size_t>& batch_sizes,
                                  const std::vector<std::uint8_t>* truth = nullptr) {
    if (queries.size() < 1000) throw Error("bench_latency: need >= 1000 queries");
    if (repetitions < 5) throw Error("bench_latency: need >= 5 repetitions");
    if (truth && truth->size() != queries.size())
        throw DimensionMismatch("bench_latency: truth labels / queries size mismatch");

    using clock = std::chrono::steady_clock;
    TimingReport report;
    double sink = 0.0; // accumulated so calls cannot be elided

    for (const auto& method : methods) {
        const std::size_t warm = std::min(kBenchWarmup, queries.size() / 10);
        for (std::size_t i = 0; i < warm; ++i) sink += method.single(queries[i]);

        std::vector<double> times;
        times.reserve(queries.size() * repetitions);
        std::vector<double> rep_means;
        for (std::size_t rep = 0; rep < repetitions; ++rep) {
            double rep_sum = 0.0;
            for (const auto& q : queries) {
                const auto t0 = clock::now();
                sink += method.single(q);
                const auto t1 = clock::now();
                const double ns =
                    static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
                times.push_back(ns);
                rep_sum += ns;
            }
            rep_means.push_back(rep_sum / static_cast<double>(queries.size()));
        }
        report.rows.push_back(TimingRow{method.name, 1, mean_of(times), std_of(times),
                                        median_of(rep_means), times.size()});

        if (truth) {
            for (const int want : {1, 0}) {
                std::vector<double> sub;
                for (std::size_t rep = 0; rep < repetitions; ++rep)
                    for (std::size_t i = 0; i < queries.size(); ++i)
                        if ((*truth)[i] == want)
                            sub.push_back(times[rep * queries.size() + i]);
                report.rows.push_back(TimingRow{method.name + (want ? "/colliding" : "/free"), 1,
                                                mean_of(sub), std_of(sub), 0.0, sub.size()});
            }
        }

        if (method.batch) {
            for (const std::size_t bs : batch_sizes) {
                if (bs < 1) continue;
                Matrix<double> qmat(bs, queries[0].size());
                std::vector<double> amortized;
                std::vector<double> rep_batch_means;
                for (std::size_t rep = 0; rep < repetitions; ++rep) {
                    double rep_sum = 0.0;
                    std::size_t rep_cnt = 0;
                    for (std::size_t begin = 0; begin + bs <= queries.size(); begin += bs) {
                        for (std::size_t i = 0; i < bs; ++i)
                            std::copy(queries[begin + i].begin(), queries[begin + i].end(),
                                      qmat.row(i));
                        const auto t0 = clock::now();
                        const std::vector<double> probs = method.batch(qmat);
                        const auto t1 = clock::now();
                        sink += probs.empty() ? 0.0 : probs[0];
                        const double ns =
                            static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count()) /
                            static_cast<double>(bs);
                        amortized.push_back(ns);
                        rep_sum += ns;
                        ++rep_cnt;
                    }
                    rep_batch_means.push_back(rep_sum / static_cast<double>(rep_cnt));
                }
                report.rows.push_back(TimingRow{method.name, bs, mean_of(amortized),
                                                std_of(amortized), median_of(rep_batch_means),
                                                amortized.size()});
            }
        }
    }
    if (!std::isfinite(sink)) report.rows.clear(); // never taken; anchors `sink`
    return report;
}

inline void write_timing_csv(const TimingReport& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write timing csv: " + path);
    out << "method,batch_size,mean_ns,std_ns,median_rep_ns,samples\n";
    char buf[256];
    for (const auto& row : r.rows) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g,%.17g,%zu\n", row.method.c_str(),
                      row.batch_size, row.mean_ns, row.std_ns, row.median_rep_ns, row.samples);
        out << buf;
    }
}

// ---------------- loss-curve export ----------------

inline void export_loss_curves(const std::vector<LossCurve>& curves, const std::string& path) {
    if (curves.empty()) throw Error("export_loss_curves: need at least one curve");
    std::size_t epochs = 0;
    for (const auto& c : curves) epochs = std::max(epochs, c.train_loss.size());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write loss csv: " + path);
    out << "epoch,mean_loss,std_loss\n";
    char buf[128];
    for (std::size_t e = 0; e < epochs; ++e) {
        std::vector<double> vals;
        for (const auto& c : curves)
            if (e < c.train_loss.size()) vals.push_back(c.train_loss[e]);
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", e, mean_of(vals), std_of(vals));
        out << buf;
    }
}

// ---------------- train/test gap study ----------------

struct GapRow {
    std::size_t size = 0;
    double mean_train_accuracy = 0.0;
    double mean_test_accuracy = 0.0;
    double mean_gap = 0.0;
};

// For each dataset size: `trials` independent (dataset, training) runs; the gap
// is train-split accuracy minus test-split accuracy.
inline std::vector<GapRow> train_gap_study(
    const std::function<Dataset(std::size_t total_size, std::uint64_t seed)>& sampler,
    const std::string& arch, EncodingLevel level, const std::vector<std::size_t>& sizes,
    std::size_t trials, const TrainConfig& base_cfg, unsigned threads = 1) {
    if (sizes.empty()) throw Error("train_gap_study: need at least one size");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] < sizes[i - 1]) throw Error("train_gap_study: sizes must be ascending");

    std::vector<std::vector<double>> train_acc(sizes.size(), std::vector<double>(trials));
    std::vector<std::vector<double>> test_acc(sizes.size(), std::vector<double>(trials));
    parallel_tasks(sizes.size() * trials, threads, [&](std::size_t cell) {
        const std::size_t si = cell / trials, trial = cell % trials;
        const Dataset ds = sampler(sizes[si], base_cfg.seed + 1000 * si + trial);
        Matrix<double> xtr_raw, xte_raw;
        std::vector<std::uint8_t> ytr, yte;
        ds.extract(Split::train, xtr_raw, ytr);
        ds.extract(Split::test, xte_raw, yte);
        const Matrix<float> xtr = encode_batch_f32(xtr_raw, level);
        const Matrix<float> xte = encode_batch_f32(xte_raw, level);
        NetworkSpec spec = preset_spec(arch, xtr.cols);
        TrainConfig cfg = base_cfg;
        cfg.seed = base_cfg.seed + 7919 * si + trial;
        auto [params, curve] = train(spec, xtr, ytr, static_cast<const Matrix<float>*>(nullptr),
                                     nullptr, cfg);
        train_acc[si][trial] = accuracy_on(params, xtr, ytr);
        test_acc[si][trial] = accuracy_on(params, xte, yte);
    });

    std::vector<GapRow> rows;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        GapRow r;
        r.size = sizes[si];
        r.mean_train_accuracy = mean_of(train_acc[si]);
        r.mean_test_accuracy = mean_of(test_acc[si]);
        r.mean_gap = r.mean_train_accuracy - r.mean_test_accuracy;
        rows.push_back(r);
    }
    return rows;
}

inline void write_gap_csv(const std::vector<GapRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write gap csv: " + path);
    out << "size,train_accuracy,test_accuracy,gap\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", r.size,
                      r.mean_train_accuracy, r.mean_test_accuracy, r.mean_gap);
        out << buf;
    }
}

} // namespace colcheck
