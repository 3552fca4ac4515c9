#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "colcheck/errors.hpp"
#include "colcheck/matrix.hpp"
#include "colcheck/threading.hpp"

namespace colcheck {

inline constexpr double kVarianceFloor = 1e-9;
inline constexpr double kLdaRidge = 1e-6;

// ---------------- k-nearest neighbours ----------------
// Exhaustive Euclidean search. Distance ties break on the lower training
// index; a majority tie falls back to the single nearest point's label.

struct KnnModel {
    std::size_t k = 5;
    Matrix<float> points;
    std::vector<std::uint8_t> labels;
};

inline KnnModel knn_fit(const Matrix<float>& x, const std::vector<std::uint8_t>& y,
                        std::size_t k = 5) {
    if (x.rows == 0) throw EmptyDataset("knn_fit: empty training data");
    if (y.size() != x.rows) throw DimensionMismatch("knn_fit: labels/features row mismatch");
    if (x.rows < k)
        throw EmptyDataset("knn_fit: need at least k=" + std::to_string(k) + " training points");
    return KnnModel{k, x, y};
}

inline int knn_predict(const KnnModel& model, const float* q, std::size_t dim) {
    if (dim != model.points.cols) throw DimensionMismatch("knn_predict: feature width mismatch");
    struct Hit {
        double d2;
        std::size_t idx;
        bool operator<(const Hit& o) const { return d2 < o.d2 || (d2 == o.d2 && idx < o.idx); }
    };
    std::vector<Hit> best; // sorted ascending, size <= k
    best.reserve(model.k + 1);
    for (std::size_t i = 0; i < model.points.rows; ++i) {
        const float* p = model.points.row(i);
        double d2 = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = static_cast<double>(q[j]) - static_cast<double>(p[j]);
            d2 += d * d;
        }
        const Hit h{d2, i};
        if (best.size() == model.k && !(h < best.back())) continue;
        best.insert(std::upper_bound(best.begin(), best.end(), h), h);
        if (best.size() > model.k) best.pop_back();
    }
    std::size_t ones = 0;
    for (const auto& h : best) ones += model.labels[h.idx];
    const std::size_t zeros = best.size() - ones;
    if (ones == zeros) return model.labels[best.front().idx];
    return ones > zeros ? 1 : 0;
}

inline std::vector<std::uint8_t> knn_predict_batch(const KnnModel& model, const Matrix<float>& q,
                                                   unsigned threads = 1) {
    std::vector<std::uint8_t> out(q.rows);
    parallel_for(q.rows, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            out[i] = static_cast<std::uint8_t>(knn_predict(model, q.row(i), q.cols));
    });
    return out;
}

// ---------------- Gaussian naive Bayes ----------------

struct GnbModel {
    std::vector<double> mean[2], var[2];
    double log_prior[2] = {0, 0};
};

inline GnbModel gnb_fit(const Matrix<float>& x, const std::vector<std::uint8_t>& y) {
    if (x.rows == 0) throw EmptyDataset("gnb_fit: empty training data");
    if (y.size() != x.rows) throw DimensionMismatch("gnb_fit: labels/features row mismatch");
    const std::size_t n = x.cols;
    std::size_t count[2] = {0, 0};
    GnbModel m;
    for (int c = 0; c < 2; ++c) {
        m.mean[c].assign(n, 0.0);
        m.var[c].assign(n, 0.0);
    }
    for (std::size_t i = 0; i < x.rows; ++i) {
        const int c = y[i];
        ++count[c];
        const float* xi = x.row(i);
        for (std::size_t j = 0; j < n; ++j) m.mean[c][j] += xi[j];
    }
    if (count[0] == 0 || count[1] == 0)
        throw SingleClassData("gnb_fit: training data contains a single class");
    for (int c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < n; ++j) m.mean[c][j] /= static_cast<double>(count[c]);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const int c = y[i];
        const float* xi = x.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double d = xi[j] - m.mean[c][j];
            m.var[c][j] += d * d;
        }
    }
    for (int c = 0; c < 2; ++c) {
        for (std::size_t j = 0; j < n; ++j)
            m.var[c][j] = std::max(kVarianceFloor, m.var[c][j] / static_cast<double>(count[c]));
        m.log_prior[c] =
            std::log(static_cast<double>(count[c]) / static_cast<double>(x.rows));
    }
    return m;
}

inline int gnb_predict(const GnbModel& model, const float* q, std::size_t dim) {
    if (dim != model.mean[0].size()) throw DimensionMismatch("gnb_predict: feature width mismatch");
    double score[2];
    for (int c = 0; c < 2; ++c) {
        double s = model.log_prior[c];
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = q[j] - model.mean[c][j];
            s += -0.5 * (std::log(2.0 * M_PI * model.var[c][j]) + d * d / model.var[c][j]);
        }
        score[c] = s;
    }
    return score[1] > score[0] ? 1 : 0;
}

// ---------------- linear discriminant analysis ----------------
// Fisher discriminant with pooled covariance + ridge; binary decision
// w.x > threshold, threshold from projected class means and priors.

struct LdaModel {
    std::vector<double> w;
    double threshold = 0.0;
    double log_prior[2] = {0, 0};
};

namespace detail {

// Cholesky solve of (S)(out) = rhs for SPD S (n x n, row-major, overwritten).
inline std::vector<double> spd_solve(std::vector<double> s, std::size_t n,
                                     std::vector<double> rhs) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = s[i * n + j];
            for (std::size_t k = 0; k < j; ++k) sum -= s[i * n + k] * s[j * n + k];
            if (i == j) {
                if (sum <= 0.0)
                    throw SingularCovariance("lda_fit: covariance not positive definite");
                s[i * n + j] = std::sqrt(sum);
            } else {
                s[i * n + j] = sum / s[j * n + j];
            }
        }
    }
    // forward then backward substitution
    for (std::size_t i = 0; i < n; ++i) {
        double sum = rhs[i];
        for (std::size_t k = 0; k < i; ++k) sum -= s[i * n + k] * rhs[k];
        rhs[i] = sum / s[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double sum = rhs[ii];
        for (std::size_t k = ii + 1; k < n; ++k) sum -= s[k * n + ii] * rhs[k];
        rhs[ii] = sum / s[ii * n + ii];
    }
    return rhs;
}

} // namespace detail

inline LdaModel lda_fit(const Matrix<float>& x, const std::vector<std::uint8_t>& y) {
    if (x.rows == 0) throw EmptyDataset("lda_fit: empty training data");
    if (y.size() != x.rows) throw DimensionMismatch("lda_fit: labels/features row mismatch");
    const std::size_t n = x.cols;
    std::size_t count[2] = {0, 0};
    std::vector<double> mean[2] = {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t i = 0; i < x.rows; ++i) {
        const int c = y[i];
        ++count[c];
        const float* xi = x.row(i);
        for (std::size_t j = 0; j < n; ++j) mean[c][j] += xi[j];
    }
    if (count[0] < 2 || count[1] < 2)
        throw SingleClassData("lda_fit: need at least 2 samples per class");
    for (int c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < n; ++j) mean[c][j] /= static_cast<double>(count[c]);

    // pooled covariance, unbiased (N - 2), then ridge
    std::vector<double> cov(n * n, 0.0);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const int c = y[i];
        const float* xi = x.row(i);
        for (std::size_t j = 0; j < n; ++j) d[j] = xi[j] - mean[c][j];
        for (std::size_t j = 0; j < n; ++j) {
            const double dj = d[j];
            if (dj == 0.0) continue;
            double* row = cov.data() + j * n;
            for (std::size_t k = j; k < n; ++k) row[k] += dj * d[k];
        }
    }
    const double denom = static_cast<double>(x.rows - 2);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j; k < n; ++k) {
            cov[j * n + k] /= denom;
            cov[k * n + j] = cov[j * n + k];
        }
    for (std::size_t j = 0; j < n; ++j) cov[j * n + j] += kLdaRidge;

    std::vector<double> diff(n);
    for (std::size_t j = 0; j < n; ++j) diff[j] = mean[1][j] - mean[0][j];

    LdaModel m;
    m.w = detail::spd_solve(cov, n, diff);
    for (int c = 0; c < 2; ++c)
        m.log_prior[c] = std::log(static_cast<double>(count[c]) / static_cast<double>(x.rows));
    double proj[2] = {0, 0};
    for (int c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < n; ++j) proj[c] += m.w[j] * mean[c][j];
    m.threshold = 0.5 * (proj[0] + proj[1]) - (m.log_prior[1] - m.log_prior[0]);
    return m;
}

inline int lda_predict(const LdaModel& model, const float* q, std::size_t dim) {
    if (dim != model.w.size()) throw DimensionMismatch("lda_predict: feature width mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) s += model.w[j] * q[j];
    return s > model.threshold ? 1 : 0;
}

} // namespace colcheck
