#pragma once

#include "vtolsim/quaternion.hpp"
#include "vtolsim/vec3.hpp"

namespace vtolsim {

struct VehicleParams {
    double mass = 0.85;                              // kg
    Vec3 inertiaDiag{4.856e-2, 4.856e-2, 8.801e-2};  // kg m^2, body frame
    double g = 9.81;                                 // m/s^2

    Mat3 inertia() const { return Mat3::diag(inertiaDiag); }
    Vec3 inertiaInvDiag() const {
        return {1.0 / inertiaDiag.x, 1.0 / inertiaDiag.y, 1.0 / inertiaDiag.z};
    }
};

struct VehicleState {
    Vec3 p{};           // position, inertial frame [m]
    Vec3 v{};           // velocity, inertial frame [m/s]
    UnitQuaternion Q{};  // attitude
    Vec3 omega{};       // angular velocity, body frame [rad/s]
};

struct ControlInput {
    double thrust = 0.0;  // N, along the body z-axis
    Vec3 torque{};        // N m, body frame
};

struct VehicleRates {
    Vec3 pDot{};
    Vec3 vDot{};
    QuatRate qDot{};
    Vec3 omegaDot{};
};

/// Rigid-body rates:
///   pdot = v
///   vdot = -g e3 + (T/m) R(Q) e3
///   Qdot = (1/2) G(Q) omega
///   Jwdot = -omega x (J omega) + tau
inline VehicleRates vehicleDerivative(const VehicleState& s, const ControlInput& u,
                                      const VehicleParams& params) {
    VehicleRates r;
    r.pDot = s.v;
    r.vDot = Vec3{0.0, 0.0, -params.g} +
             quatToRotation(s.Q) * e3() * (u.thrust / params.mass);
    r.qDot = quatKinematics(s.Q, s.omega);
    const Vec3 jw = s.omega.cwise(params.inertiaDiag);
    r.omegaDot = (u.torque - s.omega.cross(jw)).cwise(params.inertiaInvDiag());
    return r;
}

}  // namespace vtolsim
