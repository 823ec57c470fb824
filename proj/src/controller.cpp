#include "vtolsim/controller.hpp"

#include <cmath>

namespace vtolsim {

VirtualErrors virtualErrors(const Vec3& p, const Vec3& v, const EstimatorState& est,
                            const AuxiliaryState& aux, const Vec3& delta) {
    return {p - est.pHat - delta - aux.eta, v - est.vHat - aux.etaDot};
}

Vec3 commandForce(const EstimatorState& est, const AuxiliaryState& aux, const GainSet& gains) {
    const Vec3 a = aHat(est.gamma, gains.k_gamma);
    const Vec3 sat = tanhVec(aux.eta + aux.etaDot) + tanhVec(aux.etaDot);
    return Vec3{0.0, 0.0, gains.g} + a - sat * gains.k_eta;
}

Vec3 auxiliaryAcceleration(const AuxiliaryState& aux, const Vec3& pTildeE, const Vec3& vTildeE,
                           const GainSet& gains) {
    const Vec3 sat = tanhVec(aux.eta + aux.etaDot) + tanhVec(aux.etaDot);
    return sat * (-gains.k_eta) + pTildeE * gains.l_p + vTildeE * gains.l_v;
}

UnitQuaternion extractAttitude(const Vec3& u) {
    const double norm = u.norm();
    if (u.x == 0.0 && u.y == 0.0 && u.z <= 0.0) throw SingularCommandError(u);
    const double sigma = std::sqrt(0.5 + u.z / (2.0 * norm));
    // transverse components too small to resolve the rotation axis put u on
    // the singular ray at working precision
    if (!(sigma > 0.0)) throw SingularCommandError(u);
    const Vec3 q = Vec3{u.y, -u.x, 0.0} / (2.0 * norm * sigma);
    return {sigma, q};
}

double thrustMagnitude(const Vec3& u, double mass) { return mass * u.norm(); }

ForceDerivatives commandForceDerivatives(const Vec3& gamma, const Vec3& gammaDot,
                                         const Vec3& gammaDdot, const Vec3& eta,
                                         const Vec3& etaDot, const Vec3& etaDdot,
                                         const Vec3& pTildeDot, const Vec3& vTildeDot,
                                         const GainSet& gains) {
    ForceDerivatives out;

    const Vec3 gammaBar = sech2Vec(gamma);          // diag of GammaBar
    const Vec3 x = eta + etaDot;
    out.dDiag = sech2Vec(x);                        // D = diag(sech^2(eta + etaDot))
    out.sDiag = sech2Vec(etaDot);                   // S = diag(sech^2(etaDot))
    const Vec3 xDot = etaDot + etaDdot;
    out.dBarDiag = tanhVec(x).cwise(out.dDiag).cwise(xDot) * -2.0;
    out.sBarDiag = tanhVec(etaDot).cwise(out.sDiag).cwise(etaDdot) * -2.0;

    const Vec3 satRate = out.dDiag.cwise(etaDot) + (out.dDiag + out.sDiag).cwise(etaDdot);
    out.uDot = gammaBar.cwise(gammaDot) * gains.k_gamma - satRate * gains.k_eta;

    out.etaDddot =
        satRate * (-gains.k_eta) + pTildeDot * gains.l_p + vTildeDot * gains.l_v;

    // d/dt of the aHat term: k_gamma (GammaBar gammaDdot - 2 GammaBar Gamma gammaDot)
    const Vec3 aTerm =
        gammaBar.cwise(gammaDdot) -
        gammaBar.cwise(tanhVec(gamma)).cwise(gammaDot).cwise(gammaDot) * 2.0;
    const Vec3 satAccel = out.dBarDiag.cwise(etaDot) +
                          (out.dBarDiag + out.dDiag + out.sBarDiag).cwise(etaDdot) +
                          (out.dDiag + out.sDiag).cwise(out.etaDddot);
    out.uDdot = aTerm * gains.k_gamma - satAccel * gains.k_eta;
    return out;
}

namespace {

/// G(Q)^T r for a quaternion-shaped pair (w, q) and 4-vector rate r.
Vec3 gTranspose(double w, const Vec3& q, const QuatRate& r) {
    return -r.w * q + r.q * w - q.cross(r.q);
}

}  // namespace

AttitudeCommand commandRates(const Vec3& u, const Vec3& uDot, const Vec3& uDdot) {
    AttitudeCommand cmd;
    cmd.Qc = extractAttitude(u);

    const double U = u.norm();
    const double Ud = u.dot(uDot) / U;
    const double Udd = (uDot.dot(uDot) + u.dot(uDdot) - Ud * Ud) / U;

    const double sigma = cmd.Qc.w;
    const double A = uDot.z * U - u.z * Ud;
    const double Adot = uDdot.z * U - u.z * Udd;
    const double sigmaDot = A / (4.0 * sigma * U * U);
    const double sigmaDdot =
        ((Adot * U - 2.0 * A * Ud) / (2.0 * U * U * U) - 2.0 * sigmaDot * sigmaDot) /
        (2.0 * sigma);

    const double c = 1.0 / (2.0 * U * sigma);
    const double cDot = -c * (Ud / U + sigmaDot / sigma);
    const double cDdot = -cDot * (Ud / U + sigmaDot / sigma) -
                         c * ((Udd * U - Ud * Ud) / (U * U) +
                              (sigmaDdot * sigma - sigmaDot * sigmaDot) / (sigma * sigma));

    const Vec3 h{u.y, -u.x, 0.0};
    const Vec3 hDot{uDot.y, -uDot.x, 0.0};
    const Vec3 hDdot{uDdot.y, -uDdot.x, 0.0};

    const QuatRate QcDot{sigmaDot, h * cDot + hDot * c};
    const QuatRate QcDdot{sigmaDdot, h * cDdot + hDot * (2.0 * cDot) + hDdot * c};

    cmd.omegaC = 2.0 * gTranspose(cmd.Qc.w, cmd.Qc.q, QcDot);
    // Gdot(Qc)^T QcDot + G(Qc)^T QcDdot  (the first term vanishes identically
    // but is kept to mirror the construction)
    cmd.omegaCDot =
        2.0 * (gTranspose(QcDot.w, QcDot.q, QcDot) + gTranspose(cmd.Qc.w, cmd.Qc.q, QcDdot));
    return cmd;
}

AttitudeError attitudeError(const UnitQuaternion& Q, const UnitQuaternion& Qc, const Vec3& omega,
                            const Vec3& omegaC) {
    AttitudeError err;
    err.Qe = quatProduct(quatInverse(Qc), Q);
    err.omegaE = omega - quatToRotation(err.Qe) * omegaC;
    return err;
}

Vec3 appliedTorque(const AttitudeError& err, const Vec3& omega, const Vec3& omegaC,
                   const Vec3& omegaCDot, const Vec3& inertiaDiag, const GainSet& gains) {
    const Vec3 r = err.Qe.q * gains.l_q + err.omegaE;
    const Mat3 Re = quatToRotation(err.Qe);
    const Vec3 sliding = (err.omegaE * err.Qe.w + err.Qe.q.cross(err.omegaE));
    const Vec3 coupling = err.omegaE.cross(Re * omegaC) - Re * omegaCDot;
    return r * (-gains.k_q) - sliding.cwise(inertiaDiag) * (0.5 * gains.l_q) +
           omega.cross(omega.cwise(inertiaDiag)) - coupling.cwise(inertiaDiag);
}

}  // namespace vtolsim
