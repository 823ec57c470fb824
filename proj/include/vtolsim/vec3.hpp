#pragma once

#include <cmath>
#include <cstddef>

namespace vtolsim {

/// 3-vector with the handful of operations the simulator needs.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    /// Componentwise product.
    constexpr Vec3 cwise(const Vec3& o) const { return {x * o.x, y * o.y, z * o.z}; }

    double norm() const { return std::sqrt(dot(*this)); }
    constexpr double squaredNorm() const { return dot(*this); }
    double normInf() const {
        return std::fmax(std::fabs(x), std::fmax(std::fabs(y), std::fabs(z)));
    }

    bool isFinite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

    double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// 3x3 matrix, row-major.
struct Mat3 {
    double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

    static constexpr Mat3 identity() {
        Mat3 r;
        r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
        return r;
    }
    static constexpr Mat3 zero() { return {}; }
    static constexpr Mat3 diag(const Vec3& d) {
        Mat3 r;
        r.m[0][0] = d.x; r.m[1][1] = d.y; r.m[2][2] = d.z;
        return r;
    }
    static constexpr Mat3 fromRows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
        Mat3 r;
        r.m[0][0] = r0.x; r.m[0][1] = r0.y; r.m[0][2] = r0.z;
        r.m[1][0] = r1.x; r.m[1][1] = r1.y; r.m[1][2] = r1.z;
        r.m[2][0] = r2.x; r.m[2][1] = r2.y; r.m[2][2] = r2.z;
        return r;
    }

    constexpr double operator()(int r, int c) const { return m[r][c]; }
    double& operator()(int r, int c) { return m[r][c]; }

    constexpr Vec3 operator*(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }
    constexpr Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j] + m[i][2] * o.m[2][j];
        return r;
    }
    constexpr Mat3 operator+(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
        return r;
    }
    constexpr Mat3 operator-(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
        return r;
    }
    constexpr Mat3 operator*(double s) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] * s;
        return r;
    }
    constexpr Mat3 transpose() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }
    constexpr Vec3 col(int j) const { return {m[0][j], m[1][j], m[2][j]}; }
    constexpr Vec3 row(int i) const { return {m[i][0], m[i][1], m[i][2]}; }
    constexpr double trace() const { return m[0][0] + m[1][1] + m[2][2]; }
    constexpr double det() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
    double frobeniusNorm() const {
        double s = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) s += m[i][j] * m[i][j];
        return std::sqrt(s);
    }
};

constexpr Mat3 operator*(double s, const Mat3& a) { return a * s; }

/// Cross-product matrix: skew(v) * w == v x w.
constexpr Mat3 skew(const Vec3& v) {
    return Mat3::fromRows({0.0, -v.z, v.y}, {v.z, 0.0, -v.x}, {-v.y, v.x, 0.0});
}

/// Outer product a * b^T.
constexpr Mat3 outer(const Vec3& a, const Vec3& b) {
    return Mat3::fromRows(b * a.x, b * a.y, b * a.z);
}

inline Vec3 tanhVec(const Vec3& v) { return {std::tanh(v.x), std::tanh(v.y), std::tanh(v.z)}; }

/// sech^2 evaluated as (1/cosh)^2 so large arguments decay smoothly
/// into subnormals instead of cancelling to exact zero.
inline double sech2(double x) {
    const double s = 1.0 / std::cosh(x);
    return s * s;
}

inline Vec3 sech2Vec(const Vec3& v) { return {sech2(v.x), sech2(v.y), sech2(v.z)}; }

/// Diagonal matrix of 1 - tanh^2 components; entries in (0, 1].
inline Mat3 sech2Diag(const Vec3& v) { return Mat3::diag(sech2Vec(v)); }

/// Componentwise sign with sgn(0) = 0.
inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

inline Vec3 sgnVec(const Vec3& v) { return {sgn(v.x), sgn(v.y), sgn(v.z)}; }

/// Boundary-layer approximation of sgn: tanh(x / eps).
inline Vec3 sgnSmoothedVec(const Vec3& v, double eps) {
    return {std::tanh(v.x / eps), std::tanh(v.y / eps), std::tanh(v.z / eps)};
}

constexpr Vec3 e3() { return {0.0, 0.0, 1.0}; }

}  // namespace vtolsim
