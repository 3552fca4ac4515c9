// colcheck: learned self-collision checking for serial arms.
// Subcommands cover the full pipeline: robot + dataset generation, training,
// evaluation, L sweeps, configuration-space slices, latency benchmarks, and
// the train/test-gap study. Every command writes a manifest next to its
// primary output so runs can be reproduced exactly (timing values excepted).

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "colcheck/dataset.hpp"
#include "colcheck/encoding.hpp"
#include "colcheck/evalbench.hpp"
#include "colcheck/model_io.hpp"
#include "colcheck/nn.hpp"
#include "colcheck/robot.hpp"
#include "colcheck/runtime.hpp"
#include "colcheck/threading.hpp"
#include "colcheck/version.hpp"

namespace {

using namespace colcheck;
namespace fs = std::filesystem;

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string iso_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// Collects resolved flags, seeds and input hashes; written alongside outputs.
struct Manifest {
    std::string command;
    nlohmann::json flags = nlohmann::json::object();
    nlohmann::json inputs = nlohmann::json::object();

    void flag(const std::string& k, const nlohmann::json& v) { flags[k] = v; }
    void input(const std::string& path) { inputs[path] = hex64(fnv1a_file(path)); }

    void write(const std::string& path) const {
        nlohmann::json doc;
        doc["command"] = command;
        doc["flags"] = flags;
        doc["input_hashes"] = inputs;
        doc["tool_version"] = kVersion;
        doc["timestamp"] = iso_timestamp();
        std::ofstream out(path);
        if (!out) throw IoError("cannot write manifest: " + path);
        out << doc.dump(2) << '\n';
    }
};

// Tracks files written by the running command; a failure removes them so no
// partial outputs survive.
struct OutputGuard {
    std::vector<std::string> paths;
    bool committed = false;

    void add(const std::string& p) { paths.push_back(p); }
    void commit() { committed = true; }
    ~OutputGuard() {
        if (committed) return;
        for (const auto& p : paths) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }
};

struct GlobalOpts {
    unsigned threads = hardware_threads();
};

int run_gen_robot(const std::string& out_dir, GlobalOpts&) {
    OutputGuard guard;
    const RobotModel robot = make_desk_arm();
    save_robot(robot, out_dir);
    guard.add((fs::path(out_dir) / "desk_arm.json").string());

    Manifest m;
    m.command = "gen-robot";
    m.flag("out", out_dir);
    m.flag("robot_hash", robot_hash_hex(robot));
    m.write((fs::path(out_dir) / "manifest.json").string());
    guard.commit();
    std::cout << "wrote " << out_dir << "/desk_arm.json (hash " << robot_hash_hex(robot)
              << ")\n";
    return 0;
}

int run_gen_data(const std::string& robot_path, bool synthetic2d, std::size_t n_per_class,
                 std::size_t draws, std::uint64_t seed, const std::string& out, GlobalOpts& g) {
    OutputGuard guard;
    Manifest m;
    m.command = "gen-data";
    m.flag("seed", seed);
    m.flag("out", out);
    m.flag("threads", g.threads);

    Dataset ds;
    if (synthetic2d) {
        if (draws > 0) {
            ds = sample_2d_dataset(draws, seed);
            m.flag("draws", draws);
        } else {
            // quota form: draw until each class holds n_per_class points
            Rng rng = Rng(seed).stream(0x2D);
            std::vector<std::vector<double>> cls[2];
            while (cls[0].size() < n_per_class || cls[1].size() < n_per_class) {
                const double x = rng.uniform(), y = rng.uniform();
                const int c = inside_discs_2d(x, y) ? 1 : 0;
                if (cls[c].size() < n_per_class) cls[c].push_back({x, y});
            }
            DatasetMeta meta;
            meta.d = 2;
            meta.source = "synthetic2d";
            meta.seed = seed;
            ds = detail::assemble_balanced(cls, 2, std::move(meta));
            m.flag("n_per_class", n_per_class);
        }
        m.flag("source", "synthetic2d");
    } else {
        const RobotModel robot = load_robot(robot_path);
        m.input(robot_path);
        m.flag("robot", robot_path);
        m.flag("n_per_class", n_per_class);
        m.flag("source", "robot");
        ds = sample_robot_dataset(robot, n_per_class, seed, g.threads);
    }
    save_dataset(ds, out);
    guard.add(out);
    guard.add(out + ".meta.json");
    m.flag("rows", ds.size());
    m.write(out + ".manifest.json");
    guard.add(out + ".manifest.json");
    guard.commit();
    std::cout << "wrote " << out << " (" << ds.size() << " rows)\n";
    return 0;
}

int run_train(const std::string& data_path, const std::string& arch, int L, std::size_t epochs,
              std::size_t batch_size, double lr, std::uint64_t seed, const std::string& out,
              const std::string& curve_out, GlobalOpts&) {
    OutputGuard guard;
    const Dataset ds = load_dataset(data_path);
    const EncodingLevel level(L);

    Matrix<double> xtr_raw, xva_raw;
    std::vector<std::uint8_t> ytr, yva;
    ds.extract(Split::train, xtr_raw, ytr);
    ds.extract(Split::val, xva_raw, yva);
    const Matrix<float> xtr = encode_batch_f32(xtr_raw, level);
    const Matrix<float> xva = encode_batch_f32(xva_raw, level);

    const NetworkSpec spec = preset_spec(arch, encoded_length(ds.dim(), level));
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.batch_size = batch_size;
    cfg.learning_rate = lr;
    cfg.seed = seed;
    auto [params, curve] = train(spec, xtr, ytr, &xva, &yva, cfg);

    SavedModel model;
    model.params = std::move(params);
    model.level = level;
    model.raw_dim = ds.dim();
    save_model(model, out);
    guard.add(out);

    const std::string curve_path = curve_out.empty() ? out + ".loss.csv" : curve_out;
    export_loss_curves({curve}, curve_path);
    guard.add(curve_path);

    Manifest m;
    m.command = "train";
    m.input(data_path);
    m.flag("data", data_path);
    m.flag("arch", arch);
    m.flag("L", L);
    m.flag("epochs", epochs);
    m.flag("batch_size", batch_size);
    m.flag("learning_rate", lr);
    m.flag("seed", seed);
    m.flag("out", out);
    m.flag("loss_curve", curve_path);
    m.flag("input_dim", spec.input_dim);
    m.write(out + ".manifest.json");
    guard.add(out + ".manifest.json");
    guard.commit();
    std::cout << "trained " << arch << " (input_dim " << spec.input_dim << "), final loss "
              << curve.train_loss.back() << ", wrote " << out << "\n";
    return 0;
}

int run_eval(const std::string& model_path, const std::string& data_path,
             const std::string& split_name, const std::string& out, GlobalOpts& g) {
    OutputGuard guard;
    auto model = std::make_shared<SavedModel>(load_model(model_path));
    const Dataset ds = load_dataset(data_path);
    const Split split = split_from_string(split_name);

    Matrix<double> x;
    std::vector<std::uint8_t> y;
    ds.extract(split, x, y);
    if (x.rows == 0) throw FormatError("eval: split '" + split_name + "' is empty");
    const std::vector<double> probs = predict_batch(*model, x, g.threads);
    Metrics metrics;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const bool pred = probs[i] >= 0.5;
        const bool truth = y[i] != 0;
        if (pred && truth) ++metrics.tp;
        else if (!pred && !truth) ++metrics.tn;
        else if (pred) ++metrics.fp;
        else ++metrics.fn;
    }

    nlohmann::json result;
    result["accuracy"] = metrics.accuracy();
    result["tp"] = metrics.tp;
    result["tn"] = metrics.tn;
    result["fp"] = metrics.fp;
    result["fn"] = metrics.fn;
    result["split"] = split_name;
    result["samples"] = metrics.total();
    std::cout << result.dump(2) << '\n';
    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw IoError("cannot write metrics: " + out);
        f << result.dump(2) << '\n';
        guard.add(out);
        Manifest m;
        m.command = "eval";
        m.input(model_path);
        m.input(data_path);
        m.flag("model", model_path);
        m.flag("data", data_path);
        m.flag("split", split_name);
        m.flag("out", out);
        m.write(out + ".manifest.json");
        guard.add(out + ".manifest.json");
    }
    guard.commit();
    return 0;
}

int run_sweep(const std::string& arch, const std::string& data_path,
              const std::vector<int>& l_list, std::size_t trials, std::size_t epochs,
              std::uint64_t seed, const std::string& out, GlobalOpts& g) {
    OutputGuard guard;
    const Dataset ds = load_dataset(data_path);
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.seed = seed;
    const SweepResult r = sweep_L(arch, ds, l_list, trials, cfg, g.threads);
    write_sweep_csv(r, out);
    guard.add(out);

    Manifest m;
    m.command = "sweep";
    m.input(data_path);
    m.flag("arch", arch);
    m.flag("data", data_path);
    m.flag("L_list", l_list);
    m.flag("trials", trials);
    m.flag("epochs", epochs);
    m.flag("seed", seed);
    m.flag("out", out);
    m.flag("best_L", r.best_L);
    m.write(out + ".manifest.json");
    guard.add(out + ".manifest.json");
    guard.commit();
    std::cout << "sweep: best L = " << r.best_L << ", wrote " << out << "\n";
    return 0;
}

int run_slice(const std::string& model_path, const std::string& robot_path,
              const std::string& joints, std::size_t resolution, const std::string& out_prefix,
              GlobalOpts& g) {
    OutputGuard guard;
    auto model = std::make_shared<SavedModel>(load_model(model_path));
    auto robot = std::make_shared<RobotModel>(load_robot(robot_path));
    std::size_t ja = 0, jb = 0;
    if (std::sscanf(joints.c_str(), "%zu,%zu", &ja, &jb) != 2)
        throw FormatError("slice: --joints expects 'a,b' (zero-based indices)");
    if (model->raw_dim != robot->joint_count())
        throw DimensionMismatch("slice: model raw_dim differs from robot joint count");

    const SliceRaster r =
        slice_raster(make_net_predictor(model), make_oracle_predictor(robot),
                     robot->joint_count(), ja, jb,
                     std::vector<double>(robot->joint_count(), 0.0), resolution, g.threads);
    write_slice_ppm(r, out_prefix + ".ppm");
    guard.add(out_prefix + ".ppm");
    write_slice_csv(r, out_prefix + ".csv");
    guard.add(out_prefix + ".csv");

    Manifest m;
    m.command = "slice";
    m.input(model_path);
    m.input(robot_path);
    m.flag("model", model_path);
    m.flag("robot", robot_path);
    m.flag("joints", joints);
    m.flag("resolution", resolution);
    m.flag("out_prefix", out_prefix);
    m.flag("counts", {{"tp", r.counts[0]},
                      {"tn", r.counts[1]},
                      {"fp", r.counts[2]},
                      {"fn", r.counts[3]}});
    m.write(out_prefix + ".manifest.json");
    guard.add(out_prefix + ".manifest.json");
    guard.commit();
    std::cout << "slice: TP " << r.counts[0] << " TN " << r.counts[1] << " FP " << r.counts[2]
              << " FN " << r.counts[3] << ", wrote " << out_prefix << ".{ppm,csv}\n";
    return 0;
}

int run_bench(const std::vector<std::string>& method_specs, const std::string& robot_path,
              std::size_t queries, std::size_t repetitions,
              const std::vector<std::size_t>& batch_sizes, std::uint64_t seed,
              const std::string& out, GlobalOpts& g) {
    OutputGuard guard;
    auto robot = std::make_shared<RobotModel>(load_robot(robot_path));

    Rng rng = Rng(seed).stream(0xBE7C);
    std::vector<std::vector<double>> qs(queries, std::vector<double>(robot->joint_count()));
    for (auto& q : qs)
        for (auto& v : q) v = rng.uniform(-M_PI, M_PI);
    std::vector<std::uint8_t> truth(queries);
    parallel_for(queries, hardware_threads(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) truth[i] = self_collision(*robot, qs[i]) ? 1 : 0;
    });

    std::vector<BenchMethod> methods;
    Manifest m;
    m.command = "bench";
    // batch inference parallelism belongs to the engine, not the timing loop
    const unsigned batch_threads =
        g.threads > 1 ? g.threads : hardware_threads();
    for (const auto& spec : method_specs) {
        if (spec == "oracle") {
            methods.push_back(BenchMethod{"oracle", make_oracle_predictor(robot), nullptr});
            continue;
        }
        auto model = std::make_shared<SavedModel>(load_model(spec));
        m.input(spec);
        auto runtime = std::make_shared<NetRuntime>(*model);
        auto batch_runtime = std::make_shared<NetBatchRuntime>(*model, batch_threads);
        methods.push_back(BenchMethod{
            fs::path(spec).stem().string(),
            [model, runtime](const std::vector<double>& q) { return runtime->predict(q); },
            [model, batch_runtime](const Matrix<double>& raw) {
                return batch_runtime->infer(raw);
            }});
    }

    const TimingReport report = bench_latency(methods, qs, repetitions, batch_sizes, &truth);
    write_timing_csv(report, out);
    guard.add(out);

    m.input(robot_path);
    m.flag("robot", robot_path);
    m.flag("methods", method_specs);
    m.flag("queries", queries);
    m.flag("repetitions", repetitions);
    m.flag("batch_sizes", batch_sizes);
    m.flag("seed", seed);
    m.flag("out", out);
    m.write(out + ".manifest.json");
    guard.add(out + ".manifest.json");
    guard.commit();
    for (const auto& row : report.rows)
        std::printf("%-24s batch %4zu  mean %10.0f ns  std %10.0f ns\n", row.method.c_str(),
                    row.batch_size, row.mean_ns, row.std_ns);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int run_gap_study(const std::string& robot_path, const std::vector<std::size_t>& sizes,
                  std::size_t trials, const std::string& arch, int L, std::size_t epochs,
                  std::uint64_t seed, const std::string& out, GlobalOpts& g) {
    OutputGuard guard;
    auto robot = std::make_shared<RobotModel>(load_robot(robot_path));
    const auto sampler = [robot](std::size_t n, std::uint64_t s) {
        return sample_robot_dataset(*robot, n / 2, s, 1);
    };
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.seed = seed;
    const auto rows =
        train_gap_study(sampler, arch, EncodingLevel(L), sizes, trials, cfg, g.threads);
    write_gap_csv(rows, out);
    guard.add(out);

    Manifest m;
    m.command = "gap-study";
    m.input(robot_path);
    m.flag("robot", robot_path);
    m.flag("sizes", sizes);
    m.flag("trials", trials);
    m.flag("arch", arch);
    m.flag("L", L);
    m.flag("epochs", epochs);
    m.flag("seed", seed);
    m.flag("out", out);
    m.write(out + ".manifest.json");
    guard.add(out + ".manifest.json");
    guard.commit();
    for (const auto& r : rows)
        std::printf("size %8zu  train %.4f  test %.4f  gap %+.4f\n", r.size,
                    r.mean_train_accuracy, r.mean_test_accuracy, r.mean_gap);
    std::cout << "wrote " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"colcheck: learned self-collision checking for serial arms"};
    app.set_version_flag("--version", colcheck::kVersion);
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--threads", g.threads, "worker thread cap")->capture_default_str();

    auto* gen_robot = app.add_subcommand("gen-robot", "write the bundled desk-arm description");
    std::string gr_out = "desk_arm";
    gen_robot->add_option("--out", gr_out, "output directory")->capture_default_str();

    auto* gen_data = app.add_subcommand("gen-data", "sample a labelled dataset");
    std::string gd_robot;
    bool gd_2d = false;
    std::size_t gd_npc = 50000, gd_draws = 0;
    std::uint64_t gd_seed = 0;
    std::string gd_out = "dataset.csv";
    auto* gd_robot_opt = gen_data->add_option("--robot", gd_robot, "robot description JSON");
    auto* gd_2d_opt = gen_data->add_flag("--synthetic2d", gd_2d, "2D multi-disc source");
    gd_robot_opt->excludes(gd_2d_opt);
    gen_data->add_option("--n-per-class", gd_npc, "samples kept per class")
        ->capture_default_str();
    gen_data->add_option("--draws", gd_draws,
                         "2D only: uniform draws before balancing (overrides --n-per-class)");
    gen_data->add_option("--seed", gd_seed, "RNG seed")->capture_default_str();
    gen_data->add_option("--out", gd_out, "output CSV path")->capture_default_str();

    auto* tr = app.add_subcommand("train", "train a classifier on a dataset");
    std::string tr_data, tr_arch = "MLP3", tr_out = "model.ccm", tr_curve;
    int tr_l = 0;
    std::size_t tr_epochs = 200, tr_batch = 256;
    double tr_lr = 1e-3;
    std::uint64_t tr_seed = 0;
    tr->add_option("--data", tr_data, "dataset CSV")->required();
    tr->add_option("--arch", tr_arch, "architecture preset")->capture_default_str();
    tr->add_option("--L", tr_l, "positional-encoding level")->capture_default_str();
    tr->add_option("--epochs", tr_epochs)->capture_default_str();
    tr->add_option("--batch-size", tr_batch)->capture_default_str();
    tr->add_option("--lr", tr_lr, "Adam learning rate")->capture_default_str();
    tr->add_option("--seed", tr_seed)->capture_default_str();
    tr->add_option("--out", tr_out, "model file")->capture_default_str();
    tr->add_option("--loss-curve", tr_curve, "loss curve CSV (default <out>.loss.csv)");

    auto* ev = app.add_subcommand("eval", "evaluate a model on a dataset split");
    std::string ev_model, ev_data, ev_split = "test", ev_out;
    ev->add_option("--model", ev_model)->required();
    ev->add_option("--data", ev_data)->required();
    ev->add_option("--split", ev_split, "train|test|val")->capture_default_str();
    ev->add_option("--out", ev_out, "metrics JSON output path");

    auto* sw = app.add_subcommand("sweep", "accuracy across encoding levels");
    std::string sw_arch = "MLP3", sw_data, sw_out = "sweep.csv";
    std::vector<int> sw_list;
    std::size_t sw_trials = 1, sw_epochs = 200;
    std::uint64_t sw_seed = 0;
    sw->add_option("--arch", sw_arch)->capture_default_str();
    sw->add_option("--data", sw_data)->required();
    sw->add_option("--L-list", sw_list, "encoding levels, e.g. 0,1,2,3")
        ->required()
        ->delimiter(',');
    sw->add_option("--trials", sw_trials)->capture_default_str();
    sw->add_option("--epochs", sw_epochs)->capture_default_str();
    sw->add_option("--seed", sw_seed)->capture_default_str();
    sw->add_option("--out", sw_out)->capture_default_str();

    auto* sl = app.add_subcommand("slice", "configuration-space slice vs the oracle");
    std::string sl_model, sl_robot, sl_joints = "1,2", sl_out = "slice";
    std::size_t sl_res = 256;
    sl->add_option("--model", sl_model)->required();
    sl->add_option("--robot", sl_robot)->required();
    sl->add_option("--joints", sl_joints,
                   "zero-based joint indices a,b (1,2 = second and third joints)")
        ->capture_default_str();
    sl->add_option("--resolution", sl_res)->capture_default_str();
    sl->add_option("--out", sl_out, "output prefix for .ppm/.csv")->capture_default_str();

    auto* be = app.add_subcommand("bench", "inference latency benchmark");
    std::vector<std::string> be_models;
    std::string be_robot, be_out = "timing.csv";
    std::size_t be_queries = 10000, be_reps = 5;
    std::vector<std::size_t> be_batches = {10, 100};
    std::uint64_t be_seed = 0;
    be->add_option("--models", be_models,
                   "model files and/or the literal 'oracle', comma separated")
        ->required()
        ->delimiter(',');
    be->add_option("--robot", be_robot)->required();
    be->add_option("--queries", be_queries)->capture_default_str();
    be->add_option("--repetitions", be_reps)->capture_default_str();
    be->add_option("--batch-sizes", be_batches)->delimiter(',')->capture_default_str();
    be->add_option("--seed", be_seed)->capture_default_str();
    be->add_option("--out", be_out)->capture_default_str();

    auto* gs = app.add_subcommand("gap-study", "train/test accuracy gap vs dataset size");
    std::string gs_robot, gs_arch = "MLP1", gs_out = "gap.csv";
    std::vector<std::size_t> gs_sizes;
    std::size_t gs_trials = 3, gs_epochs = 200;
    int gs_l = 1;
    std::uint64_t gs_seed = 0;
    gs->add_option("--robot", gs_robot)->required();
    gs->add_option("--sizes", gs_sizes, "total dataset sizes, ascending")
        ->required()
        ->delimiter(',');
    gs->add_option("--trials", gs_trials)->capture_default_str();
    gs->add_option("--arch", gs_arch)->capture_default_str();
    gs->add_option("--L", gs_l)->capture_default_str();
    gs->add_option("--epochs", gs_epochs)->capture_default_str();
    gs->add_option("--seed", gs_seed)->capture_default_str();
    gs->add_option("--out", gs_out)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    // latency benchmarks default to one worker unless --threads was given
    if (be->parsed() && app.get_option("--threads")->count() == 0) g.threads = 1;

    try {
        if (gen_robot->parsed()) return run_gen_robot(gr_out, g);
        if (gen_data->parsed()) {
            if (gd_robot.empty() && !gd_2d)
                throw FormatError("gen-data: need exactly one of --robot or --synthetic2d");
            return run_gen_data(gd_robot, gd_2d, gd_npc, gd_draws, gd_seed, gd_out, g);
        }
        if (tr->parsed())
            return run_train(tr_data, tr_arch, tr_l, tr_epochs, tr_batch, tr_lr, tr_seed,
                             tr_out, tr_curve, g);
        if (ev->parsed()) return run_eval(ev_model, ev_data, ev_split, ev_out, g);
        if (sw->parsed())
            return run_sweep(sw_arch, sw_data, sw_list, sw_trials, sw_epochs, sw_seed, sw_out,
                             g);
        if (sl->parsed()) return run_slice(sl_model, sl_robot, sl_joints, sl_res, sl_out, g);
        if (be->parsed())
            return run_bench(be_models, be_robot, be_queries, be_reps, be_batches, be_seed,
                             be_out, g);
        if (gs->parsed())
            return run_gap_study(gs_robot, gs_sizes, gs_trials, gs_arch, gs_l, gs_epochs,
                                 gs_seed, gs_out, g);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnknownPreset& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
