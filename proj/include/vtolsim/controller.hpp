#pragma once

#include <stdexcept>

#include "vtolsim/estimator.hpp"
#include "vtolsim/graph.hpp"
#include "vtolsim/quaternion.hpp"
#include "vtolsim/vec3.hpp"

namespace vtolsim {

/// Raised when a command force falls in the singular set
/// U = { (0, 0, u_z) : u_z <= 0 }, where no minimal-rotation attitude exists.
class SingularCommandError : public std::runtime_error {
public:
    explicit SingularCommandError(const Vec3& u)
        : std::runtime_error("command force lies in the singular set"), u_(u) {}
    const Vec3& commandForce() const { return u_; }

private:
    Vec3 u_;
};

/// Auxiliary second-order system that keeps the command force away from
/// the singular set and supplies its own derivatives.
struct AuxiliaryState {
    Vec3 eta{};     // [m]
    Vec3 etaDot{};  // [m/s]
};

/// Attitude command handed to the torque loop.
struct AttitudeCommand {
    UnitQuaternion Qc{};
    Vec3 omegaC{};     // [rad/s]
    Vec3 omegaCDot{};  // [rad/s^2]
};

struct VirtualErrors {
    Vec3 pTildeE{};
    Vec3 vTildeE{};
};

/// pTilde = p - pHat - delta - eta,  vTilde = v - vHat - etaDot.
VirtualErrors virtualErrors(const Vec3& p, const Vec3& v, const EstimatorState& est,
                            const AuxiliaryState& aux, const Vec3& delta);

/// Command force u = g e3 + aHat - k_eta (tanh(eta + etaDot) + tanh(etaDot)).
/// Its z-component stays above g - k_gamma - 2 k_eta by construction.
Vec3 commandForce(const EstimatorState& est, const AuxiliaryState& aux, const GainSet& gains);

/// etaDdot = -k_eta (tanh(eta + etaDot) + tanh(etaDot)) + l_p pTilde + l_v vTilde.
Vec3 auxiliaryAcceleration(const AuxiliaryState& aux, const Vec3& pTildeE, const Vec3& vTildeE,
                           const GainSet& gains);

/// Minimal-rotation attitude whose thrust axis aligns with u:
///   sigma = sqrt(1/2 + u_z / (2 ||u||)),
///   q     = (u_y, -u_x, 0) / (2 ||u|| sigma).
/// Satisfies R(Qc) e3 = u / ||u|| exactly; the vector part has no
/// z-component (yaw-free). Throws SingularCommandError on the singular set.
UnitQuaternion extractAttitude(const Vec3& u);

/// T = m ||u||.
double thrustMagnitude(const Vec3& u, double mass);

struct ForceDerivatives {
    Vec3 uDot{};
    Vec3 uDdot{};
    Vec3 etaDddot{};
    Vec3 dDiag{}, sDiag{}, dBarDiag{}, sBarDiag{};
};

/// Analytic first and second derivatives of the command force along the
/// closed-loop flow, given the current estimator/auxiliary rates.
ForceDerivatives commandForceDerivatives(const Vec3& gamma, const Vec3& gammaDot,
                                         const Vec3& gammaDdot, const Vec3& eta,
                                         const Vec3& etaDot, const Vec3& etaDdot,
                                         const Vec3& pTildeDot, const Vec3& vTildeDot,
                                         const GainSet& gains);

/// Command attitude plus its angular velocity and acceleration, obtained by
/// differentiating the extraction map along (uDot, uDdot) and converting the
/// quaternion rates through omega = 2 G(Q)^T Qdot.
AttitudeCommand commandRates(const Vec3& u, const Vec3& uDot, const Vec3& uDdot);

struct AttitudeError {
    UnitQuaternion Qe{};
    Vec3 omegaE{};
};

/// Qe = Qc^-1 * Q and omegaE = omega - R(Qe) omegaC (the command body rate
/// expressed in the actual body frame under this library's conventions).
AttitudeError attitudeError(const UnitQuaternion& Q, const UnitQuaternion& Qc, const Vec3& omega,
                            const Vec3& omegaC);

/// Torque that enforces J rdot = -k_q r on the sliding surface
/// r = l_q qe + omegaE:
///   tau = -k_q r - (l_q/2) J (sigma_e I + qe^x) omegaE + omega x J omega
///         - J [ omegaE^x R(Qe) omegaC - R(Qe) omegaCDot ].
Vec3 appliedTorque(const AttitudeError& err, const Vec3& omega, const Vec3& omegaC,
                   const Vec3& omegaCDot, const Vec3& inertiaDiag, const GainSet& gains);

}  // namespace vtolsim
