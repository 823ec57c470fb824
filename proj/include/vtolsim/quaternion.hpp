#pragma once

#include "vtolsim/vec3.hpp"

namespace vtolsim {

/// Attitude quaternion Q = [w, q^T]^T with scalar part first.
///
/// Unit norm is an invariant of every attitude produced by this library;
/// during integration the components are treated as plain R^4 coordinates
/// and renormalized once per step.
struct UnitQuaternion {
    double w = 1.0;  ///< scalar part
    Vec3 q{};        ///< vector part

    constexpr UnitQuaternion() = default;
    constexpr UnitQuaternion(double w_, const Vec3& q_) : w(w_), q(q_) {}
    constexpr UnitQuaternion(double w_, double x, double y, double z) : w(w_), q(x, y, z) {}

    double norm() const { return std::sqrt(w * w + q.dot(q)); }

    UnitQuaternion normalized() const {
        const double n = norm();
        return {w / n, q / n};
    }

    bool isFinite() const { return std::isfinite(w) && q.isFinite(); }
};

/// Rate of change of a quaternion; same layout, no unit-norm semantics.
struct QuatRate {
    double w = 0.0;
    Vec3 q{};

    constexpr QuatRate() = default;
    constexpr QuatRate(double w_, const Vec3& q_) : w(w_), q(q_) {}

    constexpr QuatRate operator+(const QuatRate& o) const { return {w + o.w, q + o.q}; }
    constexpr QuatRate operator-(const QuatRate& o) const { return {w - o.w, q - o.q}; }
    constexpr QuatRate operator*(double s) const { return {w * s, q * s}; }
    double norm() const { return std::sqrt(w * w + q.dot(q)); }
};

/// Rotation matrix R(Q) = (w^2 - q^T q) I + 2 q q^T - 2 w q^x.
inline Mat3 quatToRotation(const UnitQuaternion& Q) {
    const double a = Q.w * Q.w - Q.q.dot(Q.q);
    return Mat3::identity() * a + 2.0 * outer(Q.q, Q.q) - (2.0 * Q.w) * skew(Q.q);
}

/// Quaternion product. The order is fixed by the composition rule
/// R(a * b) = R(b) R(a) under the rotation convention above.
inline UnitQuaternion quatProduct(const UnitQuaternion& a, const UnitQuaternion& b) {
    return {a.w * b.w - a.q.dot(b.q), a.q * b.w + b.q * a.w + a.q.cross(b.q)};
}

/// Inverse (conjugate) of a unit quaternion.
inline UnitQuaternion quatInverse(const UnitQuaternion& Q) { return {Q.w, -Q.q}; }

/// Attitude kinematics: Qdot = (1/2) G(Q) omega, where
/// G(Q) = [-q, w I - q^x]^T. The scalar rate is -(1/2) q . omega.
inline QuatRate quatKinematics(const UnitQuaternion& Q, const Vec3& omega) {
    return {-0.5 * Q.q.dot(omega), 0.5 * (omega * Q.w + Q.q.cross(omega))};
}

/// 2 G(Q)^T Qdot: recovers omega from a norm-preserving quaternion rate.
inline Vec3 quatRateToBodyRate(const UnitQuaternion& Q, const QuatRate& Qdot) {
    return 2.0 * (-Qdot.w * Q.q + Qdot.q * Q.w - Q.q.cross(Qdot.q));
}

}  // namespace vtolsim
