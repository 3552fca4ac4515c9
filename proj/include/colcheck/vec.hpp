#pragma once

#include <array>
#include <cmath>

namespace colcheck {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    return {v.x / n, v.y / n, v.z / n};
}

inline Vec3 cwise_min(const Vec3& a, const Vec3& b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}

inline Vec3 cwise_max(const Vec3& a, const Vec3& b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

inline bool is_finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// 3x3 row-major rotation / general matrix
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double& operator()(int r, int c) { return m[static_cast<std::size_t>(r) * 3 + c]; }
    double operator()(int r, int c) const { return m[static_cast<std::size_t>(r) * 3 + c]; }

    static Mat3 identity() { return Mat3{}; }

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }

    Mat3 transpose() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }

    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }

    // |R| applied elementwise; used to bound rotated boxes
    Mat3 cwise_abs() const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[static_cast<std::size_t>(i)] = std::fabs(m[static_cast<std::size_t>(i)]);
        return r;
    }
};

// Rodrigues rotation about a unit axis
inline Mat3 axis_angle(const Vec3& axis, double angle) {
    const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    const double x = axis.x, y = axis.y, z = axis.z;
    Mat3 r;
    r(0, 0) = t * x * x + c;     r(0, 1) = t * x * y - s * z; r(0, 2) = t * x * z + s * y;
    r(1, 0) = t * x * y + s * z; r(1, 1) = t * y * y + c;     r(1, 2) = t * y * z - s * x;
    r(2, 0) = t * x * z - s * y; r(2, 1) = t * y * z + s * x; r(2, 2) = t * z * z + c;
    return r;
}

// intrinsic roll-pitch-yaw (URDF convention): R = Rz(yaw) * Ry(pitch) * Rx(roll)
inline Mat3 rpy_to_matrix(double roll, double pitch, double yaw) {
    const double cr = std::cos(roll), sr = std::sin(roll);
    const double cp = std::cos(pitch), sp = std::sin(pitch);
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    Mat3 r;
    r(0, 0) = cy * cp; r(0, 1) = cy * sp * sr - sy * cr; r(0, 2) = cy * sp * cr + sy * sr;
    r(1, 0) = sy * cp; r(1, 1) = sy * sp * sr + cy * cr; r(1, 2) = sy * sp * cr - cy * sr;
    r(2, 0) = -sp;     r(2, 1) = cp * sr;                r(2, 2) = cp * cr;
    return r;
}

// rigid transform: p -> R*p + t
struct Pose {
    Mat3 rotation;
    Vec3 translation;

    static Pose identity() { return Pose{}; }

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

    Pose compose(const Pose& o) const {
        // apply o first, then this
        return Pose{rotation * o.rotation, rotation * o.translation + translation};
    }

    Pose inverse() const {
        const Mat3 rt = rotation.transpose();
        return Pose{rt, -(rt * translation)};
    }
};

inline bool is_orthonormal(const Mat3& r, double tol = 1e-9) {
    if (std::fabs(r.det() - 1.0) >= tol) return false;
    const Mat3 rtr = r.transpose() * r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::fabs(rtr(i, j) - want) >= tol) return false;
        }
    return true;
}

} // namespace colcheck
