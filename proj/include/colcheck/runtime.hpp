#pragma once

// Inference engines behind the latency benchmark and any caller that needs
// throughput rather than the generic std::function predictor:
//  - NetRuntime: single-query path. Preallocated scratch, polynomial encoding,
//    scalar matrix-vector layers. One instance per thread.
//  - NetBatchRuntime: bulk path. Polynomial SIMD sin/cos encoding, transposed
//    broadcast-FMA layer kernel, persistent worker pool. Results are
//    independent of batch partitioning and thread count.
// The polynomial trig is float32-accurate (~1e-6 for the frequency ranges used
// by L <= 12); training and evaluation keep the exact libm encoding.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "colcheck/encoding.hpp"
#include "colcheck/matrix.hpp"
#include "colcheck/model_io.hpp"
#include "colcheck/nn.hpp"
#include "colcheck/threading.hpp"

namespace colcheck {

namespace detail {

// Cody-Waite split of pi/2 for float range reduction (cephes sinf constants).
inline constexpr float kPio2Hi = 1.5703125f;
inline constexpr float kPio2Mid = 4.837512969970703125e-4f;
inline constexpr float kPio2Lo = 7.54978995489188e-8f;
inline constexpr float kTwoOverPi = 0.636619772f;

// sin/cos minimax polynomials on |r| <= pi/4 (float coefficients)
inline constexpr float kS1 = -1.6666654611e-1f;
inline constexpr float kS2 = 8.3321608736e-3f;
inline constexpr float kS3 = -1.9515295891e-4f;
inline constexpr float kC1 = 4.166664568298827e-2f;
inline constexpr float kC2 = -1.388731625493765e-3f;
inline constexpr float kC3 = 2.443315711809948e-5f;

// Scalar twin of the SIMD kernel: identical operation order so remainder lanes
// match vector lanes bit for bit.
inline void poly_sincos(float x, float& s_out, float& c_out) {
    const float kf = std::nearbyintf(x * kTwoOverPi);
    const std::int32_t k = static_cast<std::int32_t>(kf);
    float r = std::fmaf(-kf, kPio2Hi, x);
    r = std::fmaf(-kf, kPio2Mid, r);
    r = std::fmaf(-kf, kPio2Lo, r);
    const float r2 = r * r;
    float sp = std::fmaf(kS3, r2, kS2);
    sp = std::fmaf(sp, r2, kS1);
    const float sinr = std::fmaf(sp * r2, r, r);
    float cp = std::fmaf(kC3, r2, kC2);
    cp = std::fmaf(cp, r2, kC1);
    const float cosr = std::fmaf(cp, r2 * r2, std::fmaf(-0.5f, r2, 1.0f));
    const int quad = k & 3;
    const float s_abs = (quad & 1) ? cosr : sinr;
    const float c_abs = (quad & 1) ? sinr : cosr;
    s_out = (quad == 2 || quad == 3) ? -s_abs : s_abs;
    c_out = (quad == 1 || quad == 2) ? -c_abs : c_abs;
}

// Rational tanh approximation (the widely used degree 13/6 pair over x^2),
// accurate to a few ulp of float across the clamped range.
inline constexpr float kTanhClamp = 7.90531110763549805f;
inline constexpr float kTanhA1 = 4.89352455891786e-03f;
inline constexpr float kTanhA3 = 6.37261928875436e-04f;
inline constexpr float kTanhA5 = 1.48572235717979e-05f;
inline constexpr float kTanhA7 = 5.12229709037114e-08f;
inline constexpr float kTanhA9 = -8.60467152213735e-11f;
inline constexpr float kTanhA11 = 2.00018790482477e-13f;
inline constexpr float kTanhA13 = -2.76076847742355e-16f;
inline constexpr float kTanhB0 = 4.89352518554385e-03f;
inline constexpr float kTanhB2 = 2.26843463243900e-03f;
inline constexpr float kTanhB4 = 1.18534705686654e-04f;
inline constexpr float kTanhB6 = 1.19825839466702e-06f;

inline float fast_tanh(float x) {
    x = std::min(kTanhClamp, std::max(-kTanhClamp, x));
    const float x2 = x * x;
    float p = std::fmaf(x2, kTanhA13, kTanhA11);
    p = std::fmaf(x2, p, kTanhA9);
    p = std::fmaf(x2, p, kTanhA7);
    p = std::fmaf(x2, p, kTanhA5);
    p = std::fmaf(x2, p, kTanhA3);
    p = std::fmaf(x2, p, kTanhA1);
    p = x * p;
    float q = std::fmaf(x2, kTanhB6, kTanhB4);
    q = std::fmaf(x2, q, kTanhB2);
    q = std::fmaf(x2, q, kTanhB0);
    return p / q;
}

#ifdef COLCHECK_HAVE_AVX2
inline __m256 fast_tanh8(__m256 x) {
    const __m256 clamp = _mm256_set1_ps(kTanhClamp);
    x = _mm256_min_ps(clamp, _mm256_max_ps(_mm256_sub_ps(_mm256_setzero_ps(), clamp), x));
    const __m256 x2 = _mm256_mul_ps(x, x);
    __m256 p = _mm256_fmadd_ps(x2, _mm256_set1_ps(kTanhA13), _mm256_set1_ps(kTanhA11));
    p = _mm256_fmadd_ps(x2, p, _mm256_set1_ps(kTanhA9));
    p = _mm256_fmadd_ps(x2, p, _mm256_set1_ps(kTanhA7));
    p = _mm256_fmadd_ps(x2, p, _mm256_set1_ps(kTanhA5));
    p = _mm256_fmadd_ps(x2, p, _mm256_set1_ps(kTanhA3));
    p = _mm256_fmadd_ps(x2, p, _mm256_set1_ps(kTanhA1));
    p = _mm256_mul_ps(x, p);
    __m256 q = _mm256_fmadd_ps(x2, _mm256_set1_ps(kTanhB6), _mm256_set1_ps(kTanhB4));
    q = _mm256_fmadd_ps(x2, q, _mm256_set1_ps(kTanhB2));
    q = _mm256_fmadd_ps(x2, q, _mm256_set1_ps(kTanhB0));
    return _mm256_div_ps(p, q);
}

inline void poly_sincos8(const float* x, float* s_out, float* c_out) {
    const __m256 vx = _mm256_loadu_ps(x);
    const __m256 kf = _mm256_round_ps(_mm256_mul_ps(vx, _mm256_set1_ps(kTwoOverPi)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    const __m256i k = _mm256_cvtps_epi32(kf);
    __m256 r = _mm256_fmadd_ps(_mm256_sub_ps(_mm256_setzero_ps(), kf),
                               _mm256_set1_ps(kPio2Hi), vx);
    r = _mm256_fmadd_ps(_mm256_sub_ps(_mm256_setzero_ps(), kf), _mm256_set1_ps(kPio2Mid), r);
    r = _mm256_fmadd_ps(_mm256_sub_ps(_mm256_setzero_ps(), kf), _mm256_set1_ps(kPio2Lo), r);
    const __m256 r2 = _mm256_mul_ps(r, r);

    __m256 sp = _mm256_fmadd_ps(_mm256_set1_ps(kS3), r2, _mm256_set1_ps(kS2));
    sp = _mm256_fmadd_ps(sp, r2, _mm256_set1_ps(kS1));
    const __m256 sinr = _mm256_fmadd_ps(_mm256_mul_ps(sp, r2), r, r);

    __m256 cp = _mm256_fmadd_ps(_mm256_set1_ps(kC3), r2, _mm256_set1_ps(kC2));
    cp = _mm256_fmadd_ps(cp, r2, _mm256_set1_ps(kC1));
    const __m256 cosr = _mm256_fmadd_ps(
        cp, _mm256_mul_ps(r2, r2),
        _mm256_fmadd_ps(_mm256_set1_ps(-0.5f), r2, _mm256_set1_ps(1.0f)));

    const __m256i quad = _mm256_and_si256(k, _mm256_set1_epi32(3));
    const __m256 swap =
        _mm256_castsi256_ps(_mm256_cmpeq_epi32(_mm256_and_si256(quad, _mm256_set1_epi32(1)),
                                               _mm256_set1_epi32(1)));
    const __m256 s_abs = _mm256_blendv_ps(sinr, cosr, swap);
    const __m256 c_abs = _mm256_blendv_ps(cosr, sinr, swap);

    // sign(sin) flips in quadrants 2,3; sign(cos) flips in 1,2
    const __m256 sin_neg = _mm256_castsi256_ps(
        _mm256_cmpgt_epi32(quad, _mm256_set1_epi32(1))); // quad in {2,3}
    const __m256i qm1 = _mm256_sub_epi32(quad, _mm256_set1_epi32(1));
    const __m256 cos_neg = _mm256_castsi256_ps(_mm256_and_si256(
        _mm256_cmpgt_epi32(quad, _mm256_setzero_si256()),
        _mm256_cmpgt_epi32(_mm256_set1_epi32(2), qm1))); // quad in {1,2}
    const __m256 signbit = _mm256_set1_ps(-0.0f);
    const __m256 s = _mm256_xor_ps(s_abs, _mm256_and_ps(sin_neg, signbit));
    const __m256 c = _mm256_xor_ps(c_abs, _mm256_and_ps(cos_neg, signbit));
    _mm256_storeu_ps(s_out, s);
    _mm256_storeu_ps(c_out, c);
}
#endif

} // namespace detail

// Fast float32 positional encoding for inference: polynomial sincos, grouped
// per-scalar layout identical to encode(). Vectorized over the frequency args
// of one row; the scalar tail uses the same polynomial.
inline void fast_encode_row(const float* x, std::size_t d, int L, float* out,
                            std::vector<float>& arg_scratch, std::vector<float>& sin_scratch,
                            std::vector<float>& cos_scratch) {
    const std::size_t pairs = d * static_cast<std::size_t>(L);
    arg_scratch.resize(pairs);
    sin_scratch.resize(pairs);
    cos_scratch.resize(pairs);
    std::size_t p = 0;
    for (std::size_t i = 0; i < d; ++i) {
        float freq = static_cast<float>(M_PI);
        for (int j = 0; j < L; ++j, ++p) {
            arg_scratch[p] = freq * x[i];
            freq *= 2.0f;
        }
    }
    std::size_t v = 0;
#ifdef COLCHECK_HAVE_AVX2
    for (; v + 8 <= pairs; v += 8)
        detail::poly_sincos8(arg_scratch.data() + v, sin_scratch.data() + v,
                             cos_scratch.data() + v);
#endif
    for (; v < pairs; ++v)
        detail::poly_sincos(arg_scratch[v], sin_scratch[v], cos_scratch[v]);

    std::size_t k = 0;
    p = 0;
    for (std::size_t i = 0; i < d; ++i) {
        out[k++] = x[i];
        for (int j = 0; j < L; ++j, ++p) {
            out[k++] = sin_scratch[p];
            out[k++] = cos_scratch[p];
        }
    }
}

// Single-query inference engine: all scratch preallocated at construction, so
// a predict() call does no heap work. Not thread-safe; use one per thread.
class NetRuntime {
public:
    explicit NetRuntime(const SavedModel& model) : model_(&model) {
        const NetworkSpec& spec = model.params.spec;
        act_.resize(spec.layer_count() + 1);
        act_[0].resize(spec.input_dim);
        for (std::size_t l = 0; l < spec.layer_count(); ++l)
            act_[l + 1].resize(spec.width_of(l));
        cat_.resize(spec.skip_input_at ? spec.fan_in_of(*spec.skip_input_at) : 0);
    }

    std::size_t raw_dim() const { return model_->raw_dim; }

    double predict(const std::vector<double>& q) {
        if (q.size() != model_->raw_dim)
            throw DimensionMismatch("NetRuntime: raw feature width mismatch");
        const NetworkSpec& spec = model_->params.spec;
        const int L = model_->level.L;
        // polynomial encoding straight into the first activation buffer
        std::size_t k = 0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const float xi = static_cast<float>(q[i]);
            act_[0][k++] = xi;
            float freq = static_cast<float>(M_PI);
            for (int j = 0; j < L; ++j) {
                detail::poly_sincos(freq * xi, act_[0][k], act_[0][k + 1]);
                k += 2;
                freq *= 2.0f;
            }
        }

        const float* in = act_[0].data();
        std::size_t in_width = spec.input_dim;
        for (std::size_t l = 0; l < spec.layer_count(); ++l) {
            if (spec.skip_input_at && *spec.skip_input_at == l && l != 0) {
                std::copy(in, in + in_width, cat_.begin());
                std::copy(act_[0].begin(), act_[0].end(), cat_.begin() + static_cast<std::ptrdiff_t>(in_width));
                in = cat_.data();
                in_width += spec.input_dim;
            }
            const LayerParamsT<float>& lp = model_->params.layers[l];
            float* out = act_[l + 1].data();
            const std::size_t w = lp.w.rows;
            for (std::size_t o = 0; o < w; ++o) {
                const float* wr = lp.w.row(o);
                float s = lp.b[o];
                for (std::size_t i = 0; i < in_width; ++i) s += wr[i] * in[i];
                out[o] = s;
            }
            if (!lp.bn.gamma.empty()) {
                for (std::size_t o = 0; o < w; ++o) {
                    const float inv = 1.0f / std::sqrt(lp.bn.run_var[o] +
                                                       static_cast<float>(kBnEpsilon));
                    out[o] = lp.bn.gamma[o] * (out[o] - lp.bn.run_mean[o]) * inv + lp.bn.beta[o];
                }
            }
            switch (spec.act_of(l)) {
                case Activation::relu:
                    for (std::size_t o = 0; o < w; ++o) out[o] = out[o] > 0.0f ? out[o] : 0.0f;
                    break;
                case Activation::tanh:
                    for (std::size_t o = 0; o < w; ++o) out[o] = detail::fast_tanh(out[o]);
                    break;
                case Activation::sigmoid:
                    for (std::size_t o = 0; o < w; ++o)
                        out[o] = 1.0f / (1.0f + std::exp(-out[o]));
                    break;
                case Activation::linear:
                    break;
            }
            in = out;
            in_width = w;
        }
        return static_cast<double>(act_.back()[0]);
    }

private:
    const SavedModel* model_;
    std::vector<std::vector<float>> act_;
    std::vector<float> cat_;
};

// Bulk inference engine: fast encoding + GEMM per layer over a persistent
// worker pool. Each worker owns its scratch; a row's result depends only on
// its own values, so output is independent of chunking and thread count.
class NetBatchRuntime {
public:
    explicit NetBatchRuntime(const SavedModel& model, unsigned threads = 1)
        : model_(&model), pool_(std::max(1u, threads)),
          scratch_(pool_.size() > 1 ? pool_.size() : 1) {
        // transposed, 8-padded weights: the layer kernel walks fan_in rows and
        // accumulates all outputs in registers, which avoids horizontal sums
        for (const auto& lp : model.params.layers) {
            TposedLayer t;
            t.fan_in = lp.w.cols;
            t.fan_out = lp.w.rows;
            t.padded_out = (t.fan_out + 7) & ~std::size_t(7);
            t.wt.assign(t.fan_in * t.padded_out, 0.0f);
            for (std::size_t o = 0; o < t.fan_out; ++o)
                for (std::size_t i = 0; i < t.fan_in; ++i)
                    t.wt[i * t.padded_out + o] = lp.w(o, i);
            t.bias.assign(t.padded_out, 0.0f);
            std::copy(lp.b.begin(), lp.b.end(), t.bias.begin());
            tposed_.push_back(std::move(t));
        }
    }

    std::vector<double> infer(const Matrix<double>& raw) {
        if (raw.cols != model_->raw_dim)
            throw DimensionMismatch("NetBatchRuntime: raw feature width mismatch");
        std::vector<double> probs(raw.rows);
        if (raw.rows == 0) return probs;
        // one chunk per worker, but never smaller than 32 rows: below that the
        // pool dispatch costs more than it buys
        const unsigned nt = pool_.size();
        const std::size_t chunk =
            std::max<std::size_t>(32, (raw.rows + nt - 1) / nt);
        const std::size_t n_chunks = (raw.rows + chunk - 1) / chunk;
        if (nt == 1 || n_chunks == 1) {
            run_chunk(raw, 0, raw.rows, scratch_[0], probs);
            return probs;
        }
        pool_.run(n_chunks, [&](std::size_t ci) {
            // round-robin dealing makes chunk -> worker static: ci % nt
            Workspace& ws = scratch_[ci % nt];
            const std::size_t b = ci * chunk, e = std::min(raw.rows, b + chunk);
            run_chunk(raw, b, e, ws, probs);
        });
        return probs;
    }

private:
    struct TposedLayer {
        std::vector<float> wt;   // fan_in x padded_out, row-major
        std::vector<float> bias; // padded_out
        std::size_t fan_in = 0, fan_out = 0, padded_out = 0;
    };

    struct Workspace {
        Matrix<float> x0, h1, h2, cat;
        std::vector<float> row, args, sins, coss;
    };

    // out row = bias + in row * W^T, all outputs held in accumulators
    void layer_matmul(const TposedLayer& t, const float* in_row, float* out_row) const {
#ifdef COLCHECK_HAVE_AVX2
        // register accumulation covers layers up to 128 outputs; wider layers
        // (the 256-wide NeRF presets) take the autovectorized fallback below
        __m256 acc[16];
        const std::size_t blocks = t.padded_out / 8;
        if (blocks <= 16) {
            for (std::size_t j = 0; j < blocks; ++j)
                acc[j] = _mm256_loadu_ps(t.bias.data() + 8 * j);
            const float* wt = t.wt.data();
            for (std::size_t p = 0; p < t.fan_in; ++p, wt += t.padded_out) {
                const __m256 av = _mm256_set1_ps(in_row[p]);
                for (std::size_t j = 0; j < blocks; ++j)
                    acc[j] = _mm256_fmadd_ps(av, _mm256_loadu_ps(wt + 8 * j), acc[j]);
            }
            std::size_t o = 0;
            for (std::size_t j = 0; j < blocks; ++j, o += 8) {
                if (o + 8 <= t.fan_out) {
                    _mm256_storeu_ps(out_row + o, acc[j]);
                } else {
                    float tmp[8];
                    _mm256_storeu_ps(tmp, acc[j]);
                    for (std::size_t r = 0; o + r < t.fan_out; ++r) out_row[o + r] = tmp[r];
                }
            }
            return;
        }
#endif
        for (std::size_t o = 0; o < t.fan_out; ++o) out_row[o] = t.bias[o];
        const float* wt = t.wt.data();
        for (std::size_t p = 0; p < t.fan_in; ++p, wt += t.padded_out) {
            const float av = in_row[p];
            for (std::size_t o = 0; o < t.fan_out; ++o) out_row[o] += av * wt[o];
        }
    }

    void run_chunk(const Matrix<double>& raw, std::size_t b, std::size_t e, Workspace& ws,
                   std::vector<double>& probs) {
        const NetworkSpec& spec = model_->params.spec;
        const std::size_t m = e - b;
        ws.x0.reshape(m, spec.input_dim);
        ws.row.resize(raw.cols);
        for (std::size_t i = 0; i < m; ++i) {
            const double* src = raw.row(b + i);
            for (std::size_t j = 0; j < raw.cols; ++j) ws.row[j] = static_cast<float>(src[j]);
            fast_encode_row(ws.row.data(), raw.cols, model_->level.L, ws.x0.row(i), ws.args,
                            ws.sins, ws.coss);
        }

        const Matrix<float>* in = &ws.x0;
        for (std::size_t l = 0; l < spec.layer_count(); ++l) {
            if (spec.skip_input_at && *spec.skip_input_at == l && l != 0) {
                ws.cat.reshape(m, in->cols + ws.x0.cols);
                for (std::size_t i = 0; i < m; ++i) {
                    float* dst = ws.cat.row(i);
                    std::copy(in->row(i), in->row(i) + in->cols, dst);
                    std::copy(ws.x0.row(i), ws.x0.row(i) + ws.x0.cols, dst + in->cols);
                }
                in = &ws.cat;
            }
            const LayerParamsT<float>& lp = model_->params.layers[l];
            const TposedLayer& t = tposed_[l];
            Matrix<float>& out = (l % 2 == 0) ? ws.h1 : ws.h2;
            out.reshape(m, t.fan_out);
            const std::size_t w = lp.w.rows;
            for (std::size_t i = 0; i < m; ++i) {
                float* zi = out.row(i);
                layer_matmul(t, in->row(i), zi);
                if (!lp.bn.gamma.empty()) {
                    for (std::size_t o = 0; o < w; ++o) {
                        const float inv = 1.0f / std::sqrt(lp.bn.run_var[o] +
                                                           static_cast<float>(kBnEpsilon));
                        zi[o] = lp.bn.gamma[o] * (zi[o] - lp.bn.run_mean[o]) * inv +
                                lp.bn.beta[o];
                    }
                }
                switch (spec.act_of(l)) {
                    case Activation::relu:
                        for (std::size_t o = 0; o < w; ++o) zi[o] = zi[o] > 0.0f ? zi[o] : 0.0f;
                        break;
                    case Activation::tanh: {
                        std::size_t o = 0;
#ifdef COLCHECK_HAVE_AVX2
                        for (; o + 8 <= w; o += 8)
                            _mm256_storeu_ps(zi + o, detail::fast_tanh8(_mm256_loadu_ps(zi + o)));
#endif
                        for (; o < w; ++o) zi[o] = detail::fast_tanh(zi[o]);
                        break;
                    }
                    case Activation::sigmoid:
                        for (std::size_t o = 0; o < w; ++o)
                            zi[o] = 1.0f / (1.0f + std::exp(-zi[o]));
                        break;
                    case Activation::linear:
                        break;
                }
            }
            in = &out;
        }
        for (std::size_t i = 0; i < m; ++i) probs[b + i] = (*in)(i, 0);
    }

    const SavedModel* model_;
    ThreadPool pool_;
    std::vector<Workspace> scratch_;
    std::vector<TposedLayer> tposed_;
};

} // namespace colcheck
