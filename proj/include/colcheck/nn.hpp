#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "colcheck/errors.hpp"
#include "colcheck/matrix.hpp"
#include "colcheck/rng.hpp"

namespace colcheck {

enum class Activation { relu, tanh, sigmoid, linear };

inline const char* to_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
        case Activation::linear: return "linear";
    }
    return "?";
}

inline Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    if (s == "sigmoid") return Activation::sigmoid;
    if (s == "linear") return Activation::linear;
    throw FormatError("unknown activation: " + s);
}

struct LayerSpec {
    std::size_t width = 0;
    Activation act = Activation::relu;
    bool batch_norm = false;
};

// Hidden layers plus an implicit single-unit sigmoid output layer.
// skip_input_at (0-based hidden index) concatenates the network input to that
// layer's input, widening its fan-in by input_dim.
struct NetworkSpec {
    std::size_t input_dim = 0;
    std::vector<LayerSpec> hidden;
    std::optional<std::size_t> skip_input_at;
    std::string preset = "custom";

    std::size_t layer_count() const { return hidden.size() + 1; } // + output layer

    std::size_t width_of(std::size_t layer) const {
        return layer < hidden.size() ? hidden[layer].width : 1;
    }

    Activation act_of(std::size_t layer) const {
        return layer < hidden.size() ? hidden[layer].act : Activation::sigmoid;
    }

    bool bn_of(std::size_t layer) const {
        return layer < hidden.size() && hidden[layer].batch_norm;
    }

    std::size_t fan_in_of(std::size_t layer) const {
        std::size_t in = layer == 0 ? input_dim : hidden[layer - 1].width;
        if (skip_input_at && *skip_input_at == layer && layer != 0) in += input_dim;
        return in;
    }

    void validate() const {
        if (input_dim == 0) throw DimensionMismatch("network spec: input_dim must be >= 1");
        for (const auto& l : hidden)
            if (l.width == 0) throw DimensionMismatch("network spec: zero-width hidden layer");
        if (skip_input_at && *skip_input_at >= hidden.size())
            throw DimensionMismatch("network spec: skip_input_at out of range");
    }
};

// Table of fixed architectures. The MLP<k> names carry the encoding level the
// widths were tuned for; input_dim is still free (it depends on d and L).
inline NetworkSpec preset_spec(const std::string& name, std::size_t input_dim) {
    NetworkSpec spec;
    spec.input_dim = input_dim;
    spec.preset = name;
    auto mlp3 = [&](std::size_t w, Activation a) {
        spec.hidden.assign(3, LayerSpec{w, a, false});
    };
    if (name == "MLP0") mlp3(106, Activation::tanh);
    else if (name == "MLP1") mlp3(176, Activation::relu);
    else if (name == "MLP3") mlp3(51, Activation::relu);
    else if (name == "MLP6") mlp3(38, Activation::relu);
    else if (name == "MLP9") mlp3(25, Activation::tanh);
    else if (name == "MLP12") mlp3(160, Activation::tanh);
    else if (name == "MLP16") mlp3(111, Activation::tanh);
    else if (name == "MLP32") spec.hidden.assign(2, LayerSpec{32, Activation::relu, false});
    else if (name == "NeRF") {
        spec.hidden.assign(8, LayerSpec{256, Activation::relu, false});
        spec.skip_input_at = 5; // input joins the 6th hidden layer
    } else if (name == "NeRF_MLP" || name == "NeRF_MLP_BN") {
        spec.hidden.assign(9, LayerSpec{256, Activation::relu, false});
        spec.hidden.push_back(LayerSpec{128, Activation::sigmoid, false});
        spec.hidden[7].act = Activation::linear;
        spec.skip_input_at = 5;
        if (name == "NeRF_MLP_BN")
            for (auto& l : spec.hidden)
                if (l.act == Activation::relu) l.batch_norm = true;
    } else {
        throw UnknownPreset(
            "unknown preset '" + name +
            "'; known: MLP0 MLP1 MLP3 MLP6 MLP9 MLP12 MLP16 MLP32 NeRF NeRF_MLP NeRF_MLP_BN");
    }
    spec.validate();
    return spec;
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"MLP0",  "MLP1",  "MLP3",     "MLP6",
                                                   "MLP9",  "MLP12", "MLP16",    "MLP32",
                                                   "NeRF",  "NeRF_MLP", "NeRF_MLP_BN"};
    return names;
}

inline constexpr double kBnEpsilon = 1e-5;
inline constexpr double kBnMomentum = 0.99;
inline constexpr double kProbClamp = 1e-7;

template <typename T>
struct BnState {
    std::vector<T> gamma, beta, run_mean, run_var;
};

template <typename T>
struct LayerParamsT {
    Matrix<T> w; // fan_out x fan_in, row-major
    std::vector<T> b;
    BnState<T> bn; // empty vectors when the layer has no BN
};

template <typename T>
struct ParamsT {
    NetworkSpec spec;
    std::vector<LayerParamsT<T>> layers; // hidden layers then output layer
};

using NetworkParams = ParamsT<float>;

// He-scaled normals for relu layers, Xavier for the rest; biases zero;
// BN scale 1, shift 0, running stats (0, 1). Bit-deterministic given seed.
template <typename T = float>
ParamsT<T> init_params(const NetworkSpec& spec, std::uint64_t seed) {
    spec.validate();
    ParamsT<T> params;
    params.spec = spec;
    Rng rng = Rng(seed).stream(0xA11C0DE);
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        const std::size_t fan_in = spec.fan_in_of(l);
        const std::size_t fan_out = spec.width_of(l);
        const double std_dev = spec.act_of(l) == Activation::relu
                                   ? std::sqrt(2.0 / static_cast<double>(fan_in))
                                   : std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
        LayerParamsT<T> layer;
        layer.w.resize(fan_out, fan_in);
        for (auto& v : layer.w.a) v = static_cast<T>(std_dev * rng.normal());
        layer.b.assign(fan_out, T(0));
        if (spec.bn_of(l)) {
            layer.bn.gamma.assign(fan_out, T(1));
            layer.bn.beta.assign(fan_out, T(0));
            layer.bn.run_mean.assign(fan_out, T(0));
            layer.bn.run_var.assign(fan_out, T(1));
        }
        params.layers.push_back(std::move(layer));
    }
    return params;
}

enum class Mode { train, infer };

namespace detail {

template <typename T>
void apply_activation(Activation act, Matrix<T>& z) {
    switch (act) {
        case Activation::relu:
            for (auto& v : z.a) v = v > T(0) ? v : T(0);
            break;
        case Activation::tanh:
            for (auto& v : z.a) v = std::tanh(v);
            break;
        case Activation::sigmoid:
            for (auto& v : z.a) v = T(1) / (T(1) + std::exp(-v));
            break;
        case Activation::linear:
            break;
    }
}

template <typename T>
struct LayerCache {
    Matrix<T> in;     // layer input incl. skip concat
    Matrix<T> z;      // pre-BN pre-activation
    Matrix<T> xhat;   // BN-normalized z (train mode)
    Matrix<T> bn_out; // activation input (= z when no BN)
    Matrix<T> act;    // layer output
    std::vector<T> mean, var;
};

template <typename T>
using ForwardCache = std::vector<LayerCache<T>>;

// Full batch forward. Training passes hand `running_sink = &params` so BN
// running statistics advance from the batch statistics; inference passes leave
// it null and params stays untouched.
template <typename T>
const Matrix<T>& forward_cached(const ParamsT<T>& params, const Matrix<T>& x, Mode mode,
                                ForwardCache<T>& cache, ParamsT<T>* running_sink) {
    const NetworkSpec& spec = params.spec;
    if (x.cols != spec.input_dim)
        throw DimensionMismatch("forward: input width " + std::to_string(x.cols) +
                                " != spec input_dim " + std::to_string(spec.input_dim));
    const std::size_t m = x.rows;
    cache.resize(spec.layer_count());

    const Matrix<T>* prev = &x;
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        LayerCache<T>& c = cache[l];
        // assemble the layer input (concat network input at the skip layer)
        if (spec.skip_input_at && *spec.skip_input_at == l && l != 0) {
            c.in.resize(m, prev->cols + x.cols);
            for (std::size_t i = 0; i < m; ++i) {
                T* dst = c.in.row(i);
                const T* p = prev->row(i);
                for (std::size_t j = 0; j < prev->cols; ++j) dst[j] = p[j];
                const T* xi = x.row(i);
                for (std::size_t j = 0; j < x.cols; ++j) dst[prev->cols + j] = xi[j];
            }
        } else {
            c.in = *prev;
        }

        const LayerParamsT<T>& lp = params.layers[l];
        gemm_nt(c.in, lp.w, c.z);
        const std::size_t w = lp.w.rows;
        for (std::size_t i = 0; i < m; ++i) {
            T* zi = c.z.row(i);
            for (std::size_t j = 0; j < w; ++j) zi[j] += lp.b[j];
        }

        if (spec.bn_of(l)) {
            c.mean.assign(w, T(0));
            c.var.assign(w, T(0));
            if (mode == Mode::train) {
                for (std::size_t i = 0; i < m; ++i) {
                    const T* zi = c.z.row(i);
                    for (std::size_t j = 0; j < w; ++j) c.mean[j] += zi[j];
                }
                for (std::size_t j = 0; j < w; ++j) c.mean[j] /= static_cast<T>(m);
                for (std::size_t i = 0; i < m; ++i) {
                    const T* zi = c.z.row(i);
                    for (std::size_t j = 0; j < w; ++j) {
                        const T d = zi[j] - c.mean[j];
                        c.var[j] += d * d;
                    }
                }
                for (std::size_t j = 0; j < w; ++j) c.var[j] /= static_cast<T>(m);
                if (running_sink) {
                    BnState<T>& sink = running_sink->layers[l].bn;
                    for (std::size_t j = 0; j < w; ++j) {
                        sink.run_mean[j] = static_cast<T>(kBnMomentum) * sink.run_mean[j] +
                                           static_cast<T>(1.0 - kBnMomentum) * c.mean[j];
                        sink.run_var[j] = static_cast<T>(kBnMomentum) * sink.run_var[j] +
                                          static_cast<T>(1.0 - kBnMomentum) * c.var[j];
                    }
                }
            } else {
                for (std::size_t j = 0; j < w; ++j) {
                    c.mean[j] = lp.bn.run_mean[j];
                    c.var[j] = lp.bn.run_var[j];
                }
            }
            c.xhat.resize(m, w);
            c.bn_out.resize(m, w);
            std::vector<T> inv_std(w);
            for (std::size_t j = 0; j < w; ++j)
                inv_std[j] = T(1) / std::sqrt(c.var[j] + static_cast<T>(kBnEpsilon));
            for (std::size_t i = 0; i < m; ++i) {
                const T* zi = c.z.row(i);
                T* xh = c.xhat.row(i);
                T* bo = c.bn_out.row(i);
                for (std::size_t j = 0; j < w; ++j) {
                    xh[j] = (zi[j] - c.mean[j]) * inv_std[j];
                    bo[j] = lp.bn.gamma[j] * xh[j] + lp.bn.beta[j];
                }
            }
        } else {
            c.bn_out = c.z;
        }

        c.act = c.bn_out;
        apply_activation(spec.act_of(l), c.act);
        prev = &c.act;
    }
    return cache.back().act;
}

} // namespace detail

// Mean binary cross-entropy of sigmoid outputs against 0/1 labels.
template <typename T>
double bce_loss(const Matrix<T>& probs, const std::vector<std::uint8_t>& labels) {
    double sum = 0.0;
    for (std::size_t i = 0; i < probs.rows; ++i) {
        double p = static_cast<double>(probs(i, 0));
        p = std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
        sum += labels[i] ? -std::log(p) : -std::log(1.0 - p);
    }
    return sum / static_cast<double>(probs.rows);
}

template <typename T>
struct GradientsT {
    std::vector<Matrix<T>> dw;
    std::vector<std::vector<T>> db, dgamma, dbeta;

    void init_shapes(const ParamsT<T>& params) {
        const std::size_t n = params.layers.size();
        dw.resize(n);
        db.resize(n);
        dgamma.resize(n);
        dbeta.resize(n);
        for (std::size_t l = 0; l < n; ++l) {
            dw[l].resize(params.layers[l].w.rows, params.layers[l].w.cols);
            db[l].assign(params.layers[l].b.size(), T(0));
            dgamma[l].assign(params.layers[l].bn.gamma.size(), T(0));
            dbeta[l].assign(params.layers[l].bn.beta.size(), T(0));
        }
    }
};

// Backpropagation of mean BCE over the batch; returns the loss. BN layers are
// differentiated through their train-mode batch statistics.
template <typename T>
double gradient(ParamsT<T>& params, const Matrix<T>& x, const std::vector<std::uint8_t>& labels,
                GradientsT<T>& grads, Mode mode = Mode::train, bool update_running = false) {
    if (x.rows == 0) throw EmptyDataset("gradient: empty batch");
    if (labels.size() != x.rows) throw DimensionMismatch("gradient: labels/batch size differ");
    const NetworkSpec& spec = params.spec;
    const std::size_t m = x.rows;

    detail::ForwardCache<T> cache;
    const Matrix<T>& probs =
        detail::forward_cached(params, x, mode, cache, update_running ? &params : nullptr);
    const double loss = bce_loss(probs, labels);
    grads.init_shapes(params);

    // combined sigmoid + BCE gradient at the output
    Matrix<T> delta(m, 1);
    for (std::size_t i = 0; i < m; ++i)
        delta(i, 0) = (probs(i, 0) - static_cast<T>(labels[i])) / static_cast<T>(m);

    Matrix<T> d_in; // gradient w.r.t. the current layer's input
    for (std::size_t li = spec.layer_count(); li-- > 0;) {
        detail::LayerCache<T>& c = cache[li];
        LayerParamsT<T>& lp = params.layers[li];
        const std::size_t w = lp.w.rows;

        // delta currently holds dL/d(act output); map through the activation,
        // except at the output layer where sigmoid+BCE is already combined
        if (li + 1 != spec.layer_count()) {
            switch (spec.act_of(li)) {
                case Activation::relu:
                    for (std::size_t i = 0; i < m; ++i) {
                        T* di = delta.row(i);
                        const T* bo = c.bn_out.row(i);
                        for (std::size_t j = 0; j < w; ++j)
                            if (bo[j] <= T(0)) di[j] = T(0);
                    }
                    break;
                case Activation::tanh:
                    for (std::size_t i = 0; i < m; ++i) {
                        T* di = delta.row(i);
                        const T* a = c.act.row(i);
                        for (std::size_t j = 0; j < w; ++j) di[j] *= (T(1) - a[j] * a[j]);
                    }
                    break;
                case Activation::sigmoid:
                    for (std::size_t i = 0; i < m; ++i) {
                        T* di = delta.row(i);
                        const T* a = c.act.row(i);
                        for (std::size_t j = 0; j < w; ++j) di[j] *= a[j] * (T(1) - a[j]);
                    }
                    break;
                case Activation::linear:
                    break;
            }
        }

        if (spec.bn_of(li)) {
            // dgamma/dbeta, then pull delta back through the normalization
            std::vector<T>& dg = grads.dgamma[li];
            std::vector<T>& dbta = grads.dbeta[li];
            std::vector<T> mean_dy(w, T(0)), mean_dy_xhat(w, T(0));
            for (std::size_t i = 0; i < m; ++i) {
                const T* di = delta.row(i);
                const T* xh = c.xhat.row(i);
                for (std::size_t j = 0; j < w; ++j) {
                    dg[j] += di[j] * xh[j];
                    dbta[j] += di[j];
                    mean_dy[j] += di[j];
                    mean_dy_xhat[j] += di[j] * xh[j];
                }
            }
            if (mode == Mode::train) {
                for (std::size_t j = 0; j < w; ++j) {
                    mean_dy[j] /= static_cast<T>(m);
                    mean_dy_xhat[j] /= static_cast<T>(m);
                }
                std::vector<T> scale(w);
                for (std::size_t j = 0; j < w; ++j)
                    scale[j] = lp.bn.gamma[j] / std::sqrt(c.var[j] + static_cast<T>(kBnEpsilon));
                for (std::size_t i = 0; i < m; ++i) {
                    T* di = delta.row(i);
                    const T* xh = c.xhat.row(i);
                    for (std::size_t j = 0; j < w; ++j)
                        di[j] = scale[j] * (di[j] - mean_dy[j] - xh[j] * mean_dy_xhat[j]);
                }
            } else {
                // infer-mode stats are constants
                for (std::size_t i = 0; i < m; ++i) {
                    T* di = delta.row(i);
                    for (std::size_t j = 0; j < w; ++j)
                        di[j] = lp.bn.gamma[j] * di[j] /
                                std::sqrt(c.var[j] + static_cast<T>(kBnEpsilon));
                }
            }
        }

        gemm_tn(delta, c.in, grads.dw[li]);
        std::vector<T>& db = grads.db[li];
        for (std::size_t i = 0; i < m; ++i) {
            const T* di = delta.row(i);
            for (std::size_t j = 0; j < w; ++j) db[j] += di[j];
        }

        if (li == 0) break;
        gemm_nn(delta, lp.w, d_in);
        if (spec.skip_input_at && *spec.skip_input_at == li) {
            // drop the columns that came from the network input
            const std::size_t prev_w = d_in.cols - spec.input_dim;
            Matrix<T> trimmed(m, prev_w);
            for (std::size_t i = 0; i < m; ++i) {
                const T* src = d_in.row(i);
                T* dst = trimmed.row(i);
                for (std::size_t j = 0; j < prev_w; ++j) dst[j] = src[j];
            }
            delta = std::move(trimmed);
        } else {
            delta = std::move(d_in);
            d_in = Matrix<T>();
        }
    }
    return loss;
}

// Batch forward without gradient bookkeeping.
template <typename T>
Matrix<T> forward_batch(const ParamsT<T>& params, const Matrix<T>& x, Mode mode = Mode::infer) {
    detail::ForwardCache<T> cache;
    return detail::forward_cached(params, x, mode, cache, static_cast<ParamsT<T>*>(nullptr));
}

// Single-sample probability, infer mode.
template <typename T>
double forward(const ParamsT<T>& params, const std::vector<T>& x, Mode mode = Mode::infer) {
    if (x.size() != params.spec.input_dim)
        throw DimensionMismatch("forward: input width " + std::to_string(x.size()) +
                                " != spec input_dim " + std::to_string(params.spec.input_dim));
    Matrix<T> m(1, x.size());
    for (std::size_t i = 0; i < x.size(); ++i) m(0, i) = x[i];
    return static_cast<double>(forward_batch(params, m, mode)(0, 0));
}

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 256;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;

    void validate() const {
        if (epochs < 1) throw Error("train config: epochs must be >= 1");
        if (batch_size < 1) throw Error("train config: batch_size must be >= 1");
        if (!(learning_rate > 0)) throw Error("train config: learning_rate must be > 0");
    }
};

struct LossCurve {
    std::vector<double> train_loss;   // per-epoch mean BCE over training batches
    std::vector<double> val_accuracy; // per-epoch accuracy on the validation split
};

namespace detail {

template <typename T>
struct AdamState {
    GradientsT<T> m, v;
    std::uint64_t t = 0;

    void init(const ParamsT<T>& params) {
        m.init_shapes(params);
        v.init_shapes(params);
    }
};

template <typename T>
void adam_update_array(T* p, const T* g, T* m, T* v, std::size_t n, const TrainConfig& cfg,
                       double bc1, double bc2) {
    const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = b1 * m[i] + (T(1) - b1) * g[i];
        v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
        const double mh = static_cast<double>(m[i]) / bc1;
        const double vh = static_cast<double>(v[i]) / bc2;
        p[i] -= static_cast<T>(cfg.learning_rate * mh / (std::sqrt(vh) + cfg.adam_eps));
    }
}

} // namespace detail

// Accuracy of thresholded probabilities (>= 0.5 -> class 1) over an encoded
// feature matrix. Chunked to bound scratch memory.
template <typename T>
double accuracy_on(const ParamsT<T>& params, const Matrix<T>& x,
                   const std::vector<std::uint8_t>& y, Mode mode = Mode::infer,
                   std::size_t chunk = 4096) {
    if (x.rows == 0) throw EmptyDataset("accuracy_on: empty split");
    std::size_t correct = 0;
    Matrix<T> slice;
    for (std::size_t begin = 0; begin < x.rows; begin += chunk) {
        const std::size_t end = std::min(x.rows, begin + chunk);
        slice.resize(end - begin, x.cols);
        std::copy(x.row(begin), x.row(begin) + (end - begin) * x.cols, slice.a.begin());
        const Matrix<T> probs = forward_batch(params, slice, mode);
        for (std::size_t i = 0; i < probs.rows; ++i) {
            const int pred = probs(i, 0) >= T(0.5) ? 1 : 0;
            correct += (pred == y[begin + i]) ? 1u : 0u;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(x.rows);
}

// Mini-batch Adam on mean BCE. Deterministic for a given seed: init and the
// per-epoch shuffle both derive from cfg.seed.
template <typename T = float>
std::pair<ParamsT<T>, LossCurve> train(const NetworkSpec& spec, const Matrix<T>& x_train,
                                       const std::vector<std::uint8_t>& y_train,
                                       const Matrix<T>* x_val,
                                       const std::vector<std::uint8_t>* y_val,
                                       const TrainConfig& cfg) {
    cfg.validate();
    if (x_train.rows == 0) throw EmptyDataset("train: empty training set");
    if (x_train.cols != spec.input_dim)
        throw DimensionMismatch("train: feature width " + std::to_string(x_train.cols) +
                                " != spec input_dim " + std::to_string(spec.input_dim));
    if (y_train.size() != x_train.rows)
        throw DimensionMismatch("train: labels/features row mismatch");
    for (const auto l : y_train)
        if (l > 1) throw FormatError("train: labels must be 0 or 1");

    ParamsT<T> params = init_params<T>(spec, cfg.seed);
    detail::AdamState<T> adam;
    adam.init(params);
    GradientsT<T> grads;
    Rng shuffle_rng = Rng(cfg.seed).stream(0x5AFF1E);
    LossCurve curve;

    std::vector<std::size_t> order(x_train.rows);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    Matrix<T> xb;
    std::vector<std::uint8_t> yb;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
            const std::size_t bm = end - begin;
            xb.resize(bm, x_train.cols);
            yb.resize(bm);
            for (std::size_t i = 0; i < bm; ++i) {
                const std::size_t src = order[begin + i];
                std::copy(x_train.row(src), x_train.row(src) + x_train.cols, xb.row(i));
                yb[i] = y_train[src];
            }
            const double loss = gradient(params, xb, yb, grads, Mode::train, true);
            loss_sum += loss * static_cast<double>(bm);

            ++adam.t;
            const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam.t));
            const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam.t));
            for (std::size_t l = 0; l < params.layers.size(); ++l) {
                auto& lp = params.layers[l];
                detail::adam_update_array(lp.w.a.data(), grads.dw[l].a.data(),
                                          adam.m.dw[l].a.data(), adam.v.dw[l].a.data(),
                                          lp.w.a.size(), cfg, bc1, bc2);
                detail::adam_update_array(lp.b.data(), grads.db[l].data(), adam.m.db[l].data(),
                                          adam.v.db[l].data(), lp.b.size(), cfg, bc1, bc2);
                if (!lp.bn.gamma.empty()) {
                    detail::adam_update_array(lp.bn.gamma.data(), grads.dgamma[l].data(),
                                              adam.m.dgamma[l].data(), adam.v.dgamma[l].data(),
                                              lp.bn.gamma.size(), cfg, bc1, bc2);
                    detail::adam_update_array(lp.bn.beta.data(), grads.dbeta[l].data(),
                                              adam.m.dbeta[l].data(), adam.v.dbeta[l].data(),
                                              lp.bn.beta.size(), cfg, bc1, bc2);
                }
            }
        }
        const double epoch_loss = loss_sum / static_cast<double>(order.size());
        if (!std::isfinite(epoch_loss))
            throw NonFiniteLoss("training diverged at epoch " + std::to_string(epoch));
        curve.train_loss.push_back(epoch_loss);
        if (x_val && y_val && x_val->rows > 0)
            curve.val_accuracy.push_back(accuracy_on(params, *x_val, *y_val));
    }
    return {std::move(params), std::move(curve)};
}

} // namespace colcheck
