#pragma once

#include <cstddef>
#include <string>
#include <type_traits>
#include <vector>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define COLCHECK_HAVE_AVX2 1
#endif

#include "colcheck/errors.hpp"

namespace colcheck {

// Dense row-major matrix. Deliberately minimal: storage plus the three GEMM
// shapes the training loop needs.
template <typename T>
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<T> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, T(0)) {}

    void resize(std::size_t r, std::size_t c) {
        rows = r;
        cols = c;
        a.assign(r * c, T(0));
    }

    // shape change without zeroing; for buffers every cell of which is
    // overwritten before being read
    void reshape(std::size_t r, std::size_t c) {
        rows = r;
        cols = c;
        if (a.size() < r * c) a.resize(r * c);
    }

    T* row(std::size_t r) { return a.data() + r * cols; }
    const T* row(std::size_t r) const { return a.data() + r * cols; }

    T& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    T operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    void fill(T v) { a.assign(a.size(), v); }
};

namespace detail {

#ifdef COLCHECK_HAVE_AVX2
inline float hsum8(__m256 v) {
    const __m128 lo = _mm256_castps256_ps128(v);
    const __m128 hi = _mm256_extractf128_ps(v, 1);
    __m128 s = _mm_add_ps(lo, hi);
    s = _mm_add_ps(s, _mm_movehl_ps(s, s));
    s = _mm_add_ss(s, _mm_shuffle_ps(s, s, 1));
    return _mm_cvtss_f32(s);
}

// float kernel for the dot-product GEMM: 4 rows of B per pass, 8-wide FMA.
// The compiler cannot vectorize the reduction itself under strict FP rules.
inline void gemm_nt_f32(const Matrix<float>& A, const Matrix<float>& B, Matrix<float>& C) {
    const std::size_t m = A.rows, k = A.cols, n = B.rows;
    for (std::size_t i = 0; i < m; ++i) {
        const float* a = A.row(i);
        float* c = C.row(i);
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            const float* b0 = B.row(j);
            const float* b1 = B.row(j + 1);
            const float* b2 = B.row(j + 2);
            const float* b3 = B.row(j + 3);
            __m256 s0 = _mm256_setzero_ps(), s1 = _mm256_setzero_ps();
            __m256 s2 = _mm256_setzero_ps(), s3 = _mm256_setzero_ps();
            std::size_t p = 0;
            for (; p + 8 <= k; p += 8) {
                const __m256 av = _mm256_loadu_ps(a + p);
                s0 = _mm256_fmadd_ps(av, _mm256_loadu_ps(b0 + p), s0);
                s1 = _mm256_fmadd_ps(av, _mm256_loadu_ps(b1 + p), s1);
                s2 = _mm256_fmadd_ps(av, _mm256_loadu_ps(b2 + p), s2);
                s3 = _mm256_fmadd_ps(av, _mm256_loadu_ps(b3 + p), s3);
            }
            float t0 = hsum8(s0), t1 = hsum8(s1), t2 = hsum8(s2), t3 = hsum8(s3);
            for (; p < k; ++p) {
                const float av = a[p];
                t0 += av * b0[p];
                t1 += av * b1[p];
                t2 += av * b2[p];
                t3 += av * b3[p];
            }
            c[j] = t0;
            c[j + 1] = t1;
            c[j + 2] = t2;
            c[j + 3] = t3;
        }
        for (; j < n; ++j) {
            const float* bj = B.row(j);
            __m256 s = _mm256_setzero_ps();
            std::size_t p = 0;
            for (; p + 8 <= k; p += 8)
                s = _mm256_fmadd_ps(_mm256_loadu_ps(a + p), _mm256_loadu_ps(bj + p), s);
            float t = hsum8(s);
            for (; p < k; ++p) t += a[p] * bj[p];
            c[j] = t;
        }
    }
}
#endif

} // namespace detail

// C = A * B^T          A: m x k, B: n x k, C: m x n
// Dot-product form over contiguous rows; 4-wide j-blocking for ILP.
template <typename T>
void gemm_nt(const Matrix<T>& A, const Matrix<T>& B, Matrix<T>& C) {
    const std::size_t m = A.rows, k = A.cols, n = B.rows;
    if (B.cols != k) throw DimensionMismatch("gemm_nt: inner dimensions differ");
    C.reshape(m, n);
#ifdef COLCHECK_HAVE_AVX2
    if constexpr (std::is_same_v<T, float>) {
        detail::gemm_nt_f32(A, B, C);
        return;
    }
#endif
    for (std::size_t i = 0; i < m; ++i) {
        const T* __restrict ai = A.row(i);
        T* __restrict ci = C.row(i);
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            const T* __restrict b0 = B.row(j);
            const T* __restrict b1 = B.row(j + 1);
            const T* __restrict b2 = B.row(j + 2);
            const T* __restrict b3 = B.row(j + 3);
            T s0 = 0, s1 = 0, s2 = 0, s3 = 0;
            for (std::size_t p = 0; p < k; ++p) {
                const T av = ai[p];
                s0 += av * b0[p];
                s1 += av * b1[p];
                s2 += av * b2[p];
                s3 += av * b3[p];
            }
            ci[j] = s0;
            ci[j + 1] = s1;
            ci[j + 2] = s2;
            ci[j + 3] = s3;
        }
        for (; j < n; ++j) {
            const T* __restrict bj = B.row(j);
            T s = 0;
            for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
            ci[j] = s;
        }
    }
}

// C = A * B            A: m x n, B: n x k, C: m x k   (axpy form)
template <typename T>
void gemm_nn(const Matrix<T>& A, const Matrix<T>& B, Matrix<T>& C) {
    const std::size_t m = A.rows, n = A.cols, k = B.cols;
    if (B.rows != n) throw DimensionMismatch("gemm_nn: inner dimensions differ");
    C.resize(m, k);
    for (std::size_t i = 0; i < m; ++i) {
        const T* __restrict ai = A.row(i);
        T* __restrict ci = C.row(i);
        for (std::size_t p = 0; p < n; ++p) {
            const T av = ai[p];
            if (av == T(0)) continue;
            const T* __restrict bp = B.row(p);
            for (std::size_t q = 0; q < k; ++q) ci[q] += av * bp[q];
        }
    }
}

// C = A^T * B          A: m x n, B: m x k, C: n x k   (rank-1 accumulation)
template <typename T>
void gemm_tn(const Matrix<T>& A, const Matrix<T>& B, Matrix<T>& C) {
    const std::size_t m = A.rows, n = A.cols, k = B.cols;
    if (B.rows != m) throw DimensionMismatch("gemm_tn: outer dimensions differ");
    C.resize(n, k);
    for (std::size_t p = 0; p < m; ++p) {
        const T* __restrict ap = A.row(p);
        const T* __restrict bp = B.row(p);
        for (std::size_t j = 0; j < n; ++j) {
            const T av = ap[j];
            if (av == T(0)) continue;
            T* __restrict cj = C.row(j);
            for (std::size_t q = 0; q < k; ++q) cj[q] += av * bp[q];
        }
    }
}

} // namespace colcheck
