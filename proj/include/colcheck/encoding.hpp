#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "colcheck/errors.hpp"
#include "colcheck/matrix.hpp"

namespace colcheck {

inline constexpr int kMaxEncodingLevel = 32; // keeps 2^(L-1) exactly representable

// Number of sin/cos pairs added per input scalar; L=0 means no encoding.
struct EncodingLevel {
    int L = 0;

    EncodingLevel() = default;
    explicit EncodingLevel(int level) : L(level) {
        if (L < 0 || L > kMaxEncodingLevel)
            throw FormatError("encoding level must be in [0, " +
                              std::to_string(kMaxEncodingLevel) + "]");
    }
};

// n = d * (1 + 2L)
inline std::size_t encoded_length(std::size_t d, EncodingLevel level) {
    return d * (1 + 2 * static_cast<std::size_t>(level.L));
}

namespace detail {

// noinline: the compiler may fuse sin+cos pairs into libm sincos, whose result
// can differ from separate sin/cos by 1 ulp. A single out-of-line copy keeps
// every encode call site bit-identical.
[[gnu::noinline]] inline void sin_cos(double a, double& s, double& c) {
    s = std::sin(a);
    c = std::cos(a);
}

} // namespace detail

// Per-scalar grouped layout:
//   [x_i, sin(2^0 pi x_i), cos(2^0 pi x_i), ..., sin(2^(L-1) pi x_i), cos(2^(L-1) pi x_i)]
// repeated for i = 1..d. The raw value always leads its group, so encode(x, 0) = x.
inline void encode_into(const double* x, std::size_t d, EncodingLevel level, double* out) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < d; ++i) {
        out[k++] = x[i];
        double freq = M_PI;
        for (int j = 0; j < level.L; ++j) {
            detail::sin_cos(freq * x[i], out[k], out[k + 1]);
            k += 2;
            freq *= 2.0;
        }
    }
}

inline std::vector<double> encode(const std::vector<double>& x, EncodingLevel level) {
    std::vector<double> out(encoded_length(x.size(), level));
    encode_into(x.data(), x.size(), level, out.data());
    return out;
}

// Row k of the result is encode(row k of xs).
inline Matrix<double> encode_batch(const Matrix<double>& xs, EncodingLevel level) {
    Matrix<double> out(xs.rows, encoded_length(xs.cols, level));
    for (std::size_t r = 0; r < xs.rows; ++r)
        encode_into(xs.row(r), xs.cols, level, out.row(r));
    return out;
}

// float32 copy for feeding network tensors
inline Matrix<float> encode_batch_f32(const Matrix<double>& xs, EncodingLevel level) {
    const Matrix<double> enc = encode_batch(xs, level);
    Matrix<float> out(enc.rows, enc.cols);
    for (std::size_t i = 0; i < enc.a.size(); ++i) out.a[i] = static_cast<float>(enc.a[i]);
    return out;
}

} // namespace colcheck
