#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "colcheck/errors.hpp"
#include "colcheck/matrix.hpp"
#include "colcheck/rng.hpp"
#include "colcheck/robot.hpp"
#include "colcheck/threading.hpp"

namespace colcheck {

enum class Split : std::uint8_t { train = 0, test = 1, val = 2 };

inline const char* to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::test: return "test";
        case Split::val: return "val";
    }
    return "?";
}

inline Split split_from_string(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    if (s == "val") return Split::val;
    throw FormatError("unknown split tag: " + s);
}

struct DatasetMeta {
    std::size_t d = 0;
    std::string source;     // "robot" | "synthetic2d"
    std::uint64_t seed = 0;
    std::string robot_hash; // empty for synthetic sources
};

// Raw (pre-encoding) features with binary labels and 70:20:10 split tags.
// Each split is balanced 1:1 by construction.
struct Dataset {
    Matrix<double> features; // n x d
    std::vector<std::uint8_t> labels;
    std::vector<std::uint8_t> split;
    DatasetMeta meta;

    std::size_t size() const { return features.rows; }
    std::size_t dim() const { return features.cols; }

    std::size_t count(Split s) const {
        std::size_t n = 0;
        for (const auto v : split)
            if (v == static_cast<std::uint8_t>(s)) ++n;
        return n;
    }

    // contiguous copy of one split
    void extract(Split s, Matrix<double>& x, std::vector<std::uint8_t>& y) const {
        const std::size_t n = count(s);
        x.resize(n, features.cols);
        y.resize(n);
        std::size_t k = 0;
        for (std::size_t i = 0; i < features.rows; ++i) {
            if (split[i] != static_cast<std::uint8_t>(s)) continue;
            std::copy(features.row(i), features.row(i) + features.cols, x.row(k));
            y[k] = labels[i];
            ++k;
        }
    }
};

namespace detail {

// 70:20:10 per class; both classes use identical counts so every split is 1:1.
inline void split_counts(std::size_t per_class, std::size_t& tr, std::size_t& te,
                         std::size_t& va) {
    tr = static_cast<std::size_t>(std::llround(0.7 * static_cast<double>(per_class)));
    te = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(per_class)));
    va = per_class - tr - te;
}

// Assembles a balanced dataset from per-class feature lists (draw order kept).
inline Dataset assemble_balanced(const std::vector<std::vector<double>> cls[2], std::size_t d,
                                 DatasetMeta meta) {
    const std::size_t per_class = cls[0].size();
    std::size_t tr, te, va;
    split_counts(per_class, tr, te, va);
    Dataset ds;
    ds.meta = std::move(meta);
    ds.features.resize(2 * per_class, d);
    ds.labels.resize(2 * per_class);
    ds.split.resize(2 * per_class);
    std::size_t row = 0;
    for (int c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            std::copy(cls[c][i].begin(), cls[c][i].end(), ds.features.row(row));
            ds.labels[row] = static_cast<std::uint8_t>(c);
            const Split s = i < tr ? Split::train : (i < tr + te ? Split::test : Split::val);
            ds.split[row] = static_cast<std::uint8_t>(s);
            ++row;
        }
    }
    return ds;
}

} // namespace detail

// Uniform samples over [-pi, pi]^d labelled by self_collision, rejection-
// balanced to n_per_class per class. Candidate configurations are drawn from a
// single RNG stream and labelled in index order, so the result is a
// deterministic function of the seed for any worker count.
inline Dataset sample_robot_dataset(const RobotModel& model, std::size_t n_per_class,
                                    std::uint64_t seed, unsigned threads = 1) {
    if (n_per_class < 10) throw Error("sample_robot_dataset: n_per_class must be >= 10");
    const std::size_t d = model.joint_count();
    Rng rng = Rng(seed).stream(0xDA7A);
    std::vector<std::vector<double>> cls[2];
    cls[0].reserve(n_per_class);
    cls[1].reserve(n_per_class);

    constexpr std::size_t kBlock = 8192;
    constexpr std::size_t kStarvationWindow = 1000000;
    std::size_t draws = 0, seen[2] = {0, 0};
    bool starvation_checked = false;

    std::vector<JointConfig> block(kBlock);
    std::vector<std::uint8_t> block_label(kBlock);
    while (cls[0].size() < n_per_class || cls[1].size() < n_per_class) {
        for (auto& q : block) {
            q.resize(d);
            for (std::size_t j = 0; j < d; ++j) q[j] = rng.uniform(-M_PI, M_PI);
        }
        parallel_for(block.size(), threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                block_label[i] = self_collision(model, block[i]) ? 1 : 0;
        });
        for (std::size_t i = 0; i < block.size(); ++i) {
            const int c = block_label[i];
            ++draws;
            ++seen[c];
            if (cls[c].size() < n_per_class) cls[c].push_back(block[i]);
            if (!starvation_checked && draws >= kStarvationWindow) {
                starvation_checked = true;
                const double f0 = static_cast<double>(seen[0]) / static_cast<double>(draws);
                const double f1 = static_cast<double>(seen[1]) / static_cast<double>(draws);
                if ((f1 < 0.01 && cls[1].size() < n_per_class) ||
                    (f0 < 0.01 && cls[0].size() < n_per_class))
                    throw ClassStarvation(
                        "sample_robot_dataset: class frequency below 1% after 1e6 draws "
                        "(collision rate " + std::to_string(f1) + ")");
            }
            if (cls[0].size() >= n_per_class && cls[1].size() >= n_per_class) break;
        }
    }

    DatasetMeta meta;
    meta.d = d;
    meta.source = "robot";
    meta.seed = seed;
    meta.robot_hash = robot_hash_hex(model);
    return detail::assemble_balanced(cls, d, std::move(meta));
}

// Ground-truth region for the synthetic 2D problem: a union of six discs with
// mixed radii, giving fine detail at several scales. Inside (closed) = class 1.
inline bool inside_discs_2d(double x, double y) {
    static constexpr double cx[6] = {0.25, 0.75, 0.5, 0.2, 0.8, 0.6};
    static constexpr double cy[6] = {0.25, 0.25, 0.5, 0.8, 0.75, 0.15};
    static constexpr double r[6] = {0.12, 0.08, 0.15, 0.1, 0.07, 0.05};
    for (int i = 0; i < 6; ++i) {
        const double dx = x - cx[i], dy = y - cy[i];
        if (dx * dx + dy * dy <= r[i] * r[i]) return true;
    }
    return false;
}

// n uniform draws in [0,1]^2 labelled by inside_discs_2d, then balanced by
// discarding the surplus class (draw order kept, so each class stays uniform
// over its region). The returned dataset holds 2*min(class counts) samples.
inline Dataset sample_2d_dataset(std::size_t n, std::uint64_t seed) {
    if (n < 100) throw Error("sample_2d_dataset: n must be >= 100");
    Rng rng = Rng(seed).stream(0x2D);
    std::vector<std::vector<double>> drawn[2];
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform(), y = rng.uniform();
        drawn[inside_discs_2d(x, y) ? 1 : 0].push_back({x, y});
    }
    const std::size_t per_class = std::min(drawn[0].size(), drawn[1].size());
    std::vector<std::vector<double>> cls[2];
    for (int c = 0; c < 2; ++c)
        cls[c].assign(drawn[c].begin(), drawn[c].begin() + static_cast<std::ptrdiff_t>(per_class));
    DatasetMeta meta;
    meta.d = 2;
    meta.source = "synthetic2d";
    meta.seed = seed;
    return detail::assemble_balanced(cls, 2, std::move(meta));
}

// ---------------- CSV + sidecar persistence ----------------
// Header: f1,...,fd,label,split. Floats at 17 significant digits round-trip
// doubles exactly. Metadata goes to <path>.meta.json.

inline void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset: " + path);
    for (std::size_t j = 0; j < ds.dim(); ++j) out << 'f' << (j + 1) << ',';
    out << "label,split\n";
    char buf[64];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double* row = ds.features.row(i);
        for (std::size_t j = 0; j < ds.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", row[j]);
            out << buf << ',';
        }
        out << int(ds.labels[i]) << ',' << to_string(static_cast<Split>(ds.split[i])) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);

    nlohmann::json meta;
    meta["d"] = ds.meta.d;
    meta["source"] = ds.meta.source;
    meta["seed"] = ds.meta.seed;
    meta["robot_hash"] = ds.meta.robot_hash;
    std::size_t counts[3][2] = {};
    for (std::size_t i = 0; i < ds.size(); ++i) counts[ds.split[i]][ds.labels[i]]++;
    meta["counts"] = {{"train", {counts[0][0], counts[0][1]}},
                      {"test", {counts[1][0], counts[1][1]}},
                      {"val", {counts[2][0], counts[2][1]}}};
    std::ofstream mout(path + ".meta.json");
    if (!mout) throw IoError("cannot write dataset sidecar: " + path + ".meta.json");
    mout << meta.dump(2) << '\n';
}

inline Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset: " + path);
    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw FormatError("dataset " + path + ": empty file");
    std::size_t d = 0;
    {
        std::stringstream hs(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(hs, col, ',')) cols.push_back(col);
        if (cols.size() < 3 || cols[cols.size() - 2] != "label" || cols.back() != "split")
            throw FormatError("dataset " + path + ": bad header");
        d = cols.size() - 2;
    }
    std::vector<double> feats;
    std::vector<std::uint8_t> labels, split;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const char* p = line.c_str();
        for (std::size_t j = 0; j < d; ++j) {
            char* endp = nullptr;
            const double v = std::strtod(p, &endp);
            if (endp == p || *endp != ',')
                throw FormatError("dataset " + path + ":" + std::to_string(lineno) +
                                  ": bad row (wrong column count?)");
            feats.push_back(v);
            p = endp + 1;
        }
        char* endp = nullptr;
        const long lab = std::strtol(p, &endp, 10);
        if (endp == p || *endp != ',' || (lab != 0 && lab != 1))
            throw FormatError("dataset " + path + ":" + std::to_string(lineno) + ": bad label");
        labels.push_back(static_cast<std::uint8_t>(lab));
        split.push_back(static_cast<std::uint8_t>(split_from_string(endp + 1)));
    }
    if (labels.empty()) throw FormatError("dataset " + path + ": no rows");

    Dataset ds;
    ds.features.rows = labels.size();
    ds.features.cols = d;
    ds.features.a = std::move(feats);
    ds.labels = std::move(labels);
    ds.split = std::move(split);

    std::ifstream min(path + ".meta.json");
    if (min) {
        try {
            nlohmann::json meta;
            min >> meta;
            ds.meta.d = meta.at("d").get<std::size_t>();
            ds.meta.source = meta.at("source").get<std::string>();
            ds.meta.seed = meta.at("seed").get<std::uint64_t>();
            ds.meta.robot_hash = meta.at("robot_hash").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("dataset sidecar " + path + ".meta.json: " + e.what());
        }
        if (ds.meta.d != d)
            throw FormatError("dataset sidecar " + path + ".meta.json: d mismatch");
    } else {
        ds.meta.d = d;
        ds.meta.source = "unknown";
    }
    return ds;
}

} // namespace colcheck
