#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vtolsim/controller.hpp"
#include "vtolsim/engine.hpp"
#include "vtolsim/scenario.hpp"

using namespace vtolsim;

namespace {

std::mt19937_64 rng(31415);

Vec3 randomVec(double scale = 1.0) {
    std::uniform_real_distribution<double> d(-scale, scale);
    return {d(rng), d(rng), d(rng)};
}

UnitQuaternion randomUnitQuat() {
    std::normal_distribution<double> d(0.0, 1.0);
    return UnitQuaternion{d(rng), {d(rng), d(rng), d(rng)}}.normalized();
}

ScenarioConfig referenceConfig() {
    return ScenarioConfig::fromFile(std::string(VTOLSIM_SCENARIO_DIR) + "/helix_square.toml");
}

}  // namespace

TEST_CASE("virtual errors") {
    EstimatorState est;
    AuxiliaryState aux;

    // zero when the vehicle sits exactly on its estimated slot
    est.pHat = {1, 2, 3};
    est.vHat = {0.5, 0, 0};
    const Vec3 delta{2, 2, 0};
    VirtualErrors ve = virtualErrors(est.pHat + delta, est.vHat, est, aux, delta);
    CHECK(ve.pTildeE.norm() == 0.0);
    CHECK(ve.vTildeE.norm() == 0.0);

    // eta enters with a minus sign
    aux.eta = {0.1, -0.2, 0.3};
    ve = virtualErrors(est.pHat + delta, est.vHat, est, aux, delta);
    CHECK((ve.pTildeE + aux.eta).norm() == 0.0);

    // reference initial condition of follower 1
    est = EstimatorState{};
    aux = AuxiliaryState{};
    ve = virtualErrors({5, 3, -1}, {0, 0, 0}, est, aux, {2, 2, 0});
    CHECK((ve.pTildeE - Vec3{3, 1, -1}).norm() == 0.0);
}

TEST_CASE("command force") {
    GainSet gains;
    EstimatorState est;
    AuxiliaryState aux;
    CHECK((commandForce(est, aux, gains) - Vec3{0, 0, gains.g}).norm() == 0.0);

    const double zFloor = gains.g - gains.k_gamma - 2.0 * gains.k_eta;  // 1.31
    CHECK(zFloor == doctest::Approx(1.31).epsilon(1e-12));
    const double normCap =
        gains.g + 2.0 * std::sqrt(3.0) * gains.k_eta + std::sqrt(3.0) * gains.k_gamma;
    for (int i = 0; i < 1000; ++i) {
        // strictly above the floor while tanh is resolvable
        est.gamma = randomVec(15.0);
        aux.eta = randomVec(15.0);
        aux.etaDot = randomVec(2.0);
        CHECK(commandForce(est, aux, gains).z > zFloor);
        // at double-precision saturation the floor itself is attained
        est.gamma = randomVec(100.0);
        aux.eta = randomVec(100.0);
        aux.etaDot = randomVec(100.0);
        const Vec3 u = commandForce(est, aux, gains);
        CHECK(u.z >= zFloor);
        CHECK(u.norm() <= normCap);
    }
}

TEST_CASE("auxiliary acceleration") {
    GainSet gains;
    AuxiliaryState aux;
    CHECK(auxiliaryAcceleration(aux, Vec3{}, Vec3{}, gains).norm() == 0.0);
    CHECK((auxiliaryAcceleration(aux, {1, 0, 0}, Vec3{}, gains) - Vec3{4, 0, 0}).norm() == 0.0);

    aux.eta = {50, 50, 50};
    aux.etaDot = {50, 50, 50};
    const Vec3 sat = auxiliaryAcceleration(aux, Vec3{}, Vec3{}, gains);
    for (int k = 0; k < 3; ++k)
        CHECK(sat[k] == doctest::Approx(-2.0 * gains.k_eta).epsilon(1e-12));
}

TEST_CASE("attitude extraction") {
    const UnitQuaternion hover = extractAttitude({0, 0, 9.81});
    CHECK(hover.w == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hover.q.norm() <= 1e-15);

    CHECK_THROWS_AS(extractAttitude({0, 0, -1}), SingularCommandError);
    CHECK_THROWS_AS(extractAttitude({0, 0, 0}), SingularCommandError);

    const UnitQuaternion side = extractAttitude({9.81, 0, 0});
    const double h = std::sqrt(0.5);
    CHECK(side.w == doctest::Approx(h).epsilon(1e-14));
    CHECK(side.q.x == doctest::Approx(0.0));
    CHECK(side.q.y == doctest::Approx(-h).epsilon(1e-14));
    CHECK(side.q.z == 0.0);
    CHECK((quatToRotation(side) * e3() - Vec3{1, 0, 0}).norm() <= 1e-14);

    for (int i = 0; i < 10000; ++i) {
        Vec3 u = randomVec(20.0);
        if (u.x == 0.0 && u.y == 0.0 && u.z <= 0.0) continue;
        const UnitQuaternion qc = extractAttitude(u);
        CHECK(qc.w > 0.0);
        CHECK(qc.q.z == 0.0);
        CHECK(std::fabs(qc.norm() - 1.0) <= 1e-12);
        CHECK((quatToRotation(qc) * e3()).dot(u) ==
              doctest::Approx(u.norm()).epsilon(1e-12));
    }

    std::uniform_real_distribution<double> neg(-25.0, 0.0);
    for (int i = 0; i < 100; ++i)
        CHECK_THROWS_AS(extractAttitude({0, 0, neg(rng)}), SingularCommandError);

    // transverse part below resolvable precision counts as singular
    CHECK_THROWS_AS(extractAttitude({1e-300, 0, -5}), SingularCommandError);
    // wide-angle but well clear of the ray: still exactly aligned
    const Vec3 wide{0.01, 0, -5};
    const UnitQuaternion flip = extractAttitude(wide);
    CHECK(flip.w > 0.0);
    CHECK(std::fabs(flip.norm() - 1.0) <= 1e-10);
    CHECK((quatToRotation(flip) * e3() - wide / wide.norm()).norm() <= 1e-10);
}

TEST_CASE("thrust magnitude") {
    CHECK(thrustMagnitude({0, 0, 9.81}, 0.85) == doctest::Approx(8.3385).epsilon(1e-14));
    CHECK(thrustMagnitude(Vec3{}, 0.85) == 0.0);

    GainSet gains;
    EstimatorState est;
    AuxiliaryState aux;
    const double bound = 0.85 * (gains.g + 2.0 * std::sqrt(3.0) * gains.k_eta +
                                 std::sqrt(3.0) * gains.k_gamma);
    CHECK(bound == doctest::Approx(20.852567084685134).epsilon(1e-12));
    for (int i = 0; i < 500; ++i) {
        est.gamma = randomVec(10.0);
        aux.eta = randomVec(10.0);
        aux.etaDot = randomVec(10.0);
        CHECK(thrustMagnitude(commandForce(est, aux, gains), 0.85) <= bound);
    }
}

TEST_CASE("command force derivatives vanish at the origin") {
    GainSet gains;
    const ForceDerivatives fd = commandForceDerivatives(
        Vec3{}, Vec3{}, Vec3{}, Vec3{}, Vec3{}, Vec3{}, Vec3{}, Vec3{}, gains);
    CHECK(fd.uDot.norm() == 0.0);
    CHECK(fd.uDdot.norm() == 0.0);
    CHECK(fd.etaDddot.norm() == 0.0);
}

TEST_CASE("command rates on a constant force") {
    const Vec3 u{1.5, -0.5, 9.0};
    const AttitudeCommand cmd = commandRates(u, Vec3{}, Vec3{});
    CHECK(cmd.omegaC.norm() == 0.0);
    CHECK(cmd.omegaCDot.norm() == 0.0);
    CHECK((quatToRotation(cmd.Qc) * e3() - u / u.norm()).norm() <= 1e-14);
}

TEST_CASE("command rates against finite differences on an analytic force path") {
    // u(t) smooth and well clear of the singular set
    const auto uOf = [](double t) {
        return Vec3{2.0 * std::sin(t), std::cos(1.3 * t), 9.0 + 0.5 * std::sin(2.0 * t)};
    };
    const auto uDotOf = [](double t) {
        return Vec3{2.0 * std::cos(t), -1.3 * std::sin(1.3 * t), std::cos(2.0 * t)};
    };
    const auto uDdotOf = [](double t) {
        return Vec3{-2.0 * std::sin(t), -1.69 * std::cos(1.3 * t), -2.0 * std::sin(2.0 * t)};
    };

    const double hStep = 1e-6;
    for (double t = 0.1; t < 6.0; t += 0.37) {
        const AttitudeCommand cmd = commandRates(uOf(t), uDotOf(t), uDdotOf(t));
        const UnitQuaternion qp = extractAttitude(uOf(t + hStep));
        const UnitQuaternion qm = extractAttitude(uOf(t - hStep));
        const QuatRate fd{(qp.w - qm.w) / (2.0 * hStep), (qp.q - qm.q) / (2.0 * hStep)};

        // omega_c against the finite difference of Qc
        const Vec3 omegaFd = quatRateToBodyRate(cmd.Qc, fd);
        CHECK((omegaFd - cmd.omegaC).norm() <= 1e-4 * (1.0 + cmd.omegaC.norm()));

        // the kinematic identity: (1/2) G(Qc) omega_c reproduces Qc-dot
        const QuatRate rec = quatKinematics(cmd.Qc, cmd.omegaC);
        CHECK(std::fabs(rec.w - fd.w) <= 1e-7 * (1.0 + std::fabs(fd.w)));
        CHECK((rec.q - fd.q).norm() <= 1e-7 * (1.0 + fd.q.norm()));

        // omega_c_dot against the finite difference of omega_c
        const AttitudeCommand cp = commandRates(uOf(t + hStep), uDotOf(t + hStep),
                                                uDdotOf(t + hStep));
        const AttitudeCommand cm = commandRates(uOf(t - hStep), uDotOf(t - hStep),
                                                uDdotOf(t - hStep));
        const Vec3 omegaDotFd = (cp.omegaC - cm.omegaC) / (2.0 * hStep);
        CHECK((omegaDotFd - cmd.omegaCDot).norm() <= 1e-4 * (1.0 + cmd.omegaCDot.norm()));
    }
}

TEST_CASE("attitude error") {
    for (int i = 0; i < 200; ++i) {
        const UnitQuaternion q = randomUnitQuat();
        const Vec3 w = randomVec(3.0), wc = randomVec(3.0);

        // perfect attitude: identity error, omegaE = omega - omegaC
        const AttitudeError same = attitudeError(q, q, w, wc);
        CHECK(std::fabs(std::fabs(same.Qe.w) - 1.0) <= 1e-14);
        CHECK(same.Qe.q.norm() <= 1e-14);
        CHECK((same.omegaE - (w - wc)).norm() <= 1e-13 * (1.0 + wc.norm()));

        // rotation-composition: R(Qe) = R(Q) R(Qc)^T
        const UnitQuaternion qc = randomUnitQuat();
        const AttitudeError err = attitudeError(q, qc, w, wc);
        const Mat3 lhs = quatToRotation(err.Qe);
        const Mat3 rhs = quatToRotation(q) * quatToRotation(qc).transpose();
        CHECK((lhs - rhs).frobeniusNorm() <= 1e-12);

        // omega matching the rotated command rate zeroes the error rate
        const Vec3 matched = quatToRotation(err.Qe) * wc;
        const AttitudeError zero = attitudeError(q, qc, matched, wc);
        CHECK(zero.omegaE.norm() <= 1e-13 * (1.0 + wc.norm()));
    }
}

TEST_CASE("applied torque is zero at perfect tracking") {
    GainSet gains;
    const Vec3 inertia{4.856e-2, 4.856e-2, 8.801e-2};
    const UnitQuaternion q = randomUnitQuat();
    const AttitudeError err = attitudeError(q, q, Vec3{}, Vec3{});
    CHECK(appliedTorque(err, Vec3{}, Vec3{}, Vec3{}, inertia, gains).norm() <= 1e-14);
}

TEST_CASE("closed loop gives J rdot = -k_q r at random states") {
    GainSet gains;
    const Vec3 inertia{4.856e-2, 4.856e-2, 8.801e-2};
    for (int i = 0; i < 1000; ++i) {
        const UnitQuaternion q = randomUnitQuat();
        const UnitQuaternion qc = randomUnitQuat();
        const Vec3 w = randomVec(5.0), wc = randomVec(5.0), wcDot = randomVec(10.0);

        const AttitudeError err = attitudeError(q, qc, w, wc);
        const Vec3 tau = appliedTorque(err, w, wc, wcDot, inertia, gains);

        // error dynamics under the attitude-error kinematics
        const Mat3 re = quatToRotation(err.Qe);
        const Vec3 jwDotE =
            -w.cross(w.cwise(inertia)) + tau +
            (err.omegaE.cross(re * wc) - re * wcDot).cwise(inertia);
        const Vec3 qeDot = (err.omegaE * err.Qe.w + err.Qe.q.cross(err.omegaE)) * 0.5;
        const Vec3 r = err.Qe.q * gains.l_q + err.omegaE;
        const Vec3 jrDot = qeDot.cwise(inertia) * gains.l_q + jwDotE;
        CHECK((jrDot + r * gains.k_q).norm() <= 1e-9 * (1.0 + r.norm()));
    }
}

TEST_CASE("applied torque matches a direct transcription oracle") {
    GainSet gains;
    gains.l_q = 7.0;
    gains.k_q = 3.0;
    const Vec3 inertiaDiag{0.03, 0.05, 0.08};
    const Mat3 J = Mat3::diag(inertiaDiag);
    for (int i = 0; i < 300; ++i) {
        const AttitudeError err{randomUnitQuat(), randomVec(4.0)};
        const Vec3 w = randomVec(4.0), wc = randomVec(4.0), wcDot = randomVec(8.0);

        const Mat3 re = quatToRotation(err.Qe);
        const Vec3 r = err.Qe.q * gains.l_q + err.omegaE;
        const Vec3 oracle =
            r * (-gains.k_q) -
            (J * ((Mat3::identity() * err.Qe.w + skew(err.Qe.q)) * err.omegaE)) *
                (0.5 * gains.l_q) +
            skew(w) * (J * w) - J * (skew(err.omegaE) * (re * wc) - re * wcDot);

        const Vec3 tau = appliedTorque(err, w, wc, wcDot, inertiaDiag, gains);
        CHECK((tau - oracle).norm() <= 1e-12 * (1.0 + oracle.norm()));
    }
}

TEST_CASE("command force derivatives against finite differences on a real trajectory") {
    ScenarioConfig config = referenceConfig();
    config.sim.sgnMode = SgnMode::Smoothed;
    const SimEngine engine(config);

    FullState state = engine.initialState();
    const double dt = config.sim.dt;
    const double hStep = 1e-6;
    double t = 0.0;
    const double samples[] = {0.5, 1.0, 2.0, 4.0, 8.0};
    std::size_t next = 0;

    for (long step = 0; next < std::size(samples); ++step) {
        if (t >= samples[next] - 0.5 * dt) {
            ++next;
            const DerivativeResult mid = engine.derivative(t, state);
            const FullState plus = engine.rk4Step(t, state, hStep);
            const FullState minus = engine.rk4Step(t, state, -hStep);
            const DerivativeResult dp = engine.derivative(t + hStep, plus);
            const DerivativeResult dm = engine.derivative(t - hStep, minus);

            for (std::size_t i = 0; i < 4; ++i) {
                const Vec3 uDotFd =
                    (dp.control[i].u - dm.control[i].u) / (2.0 * hStep);
                CHECK((uDotFd - mid.control[i].uDot).norm() <=
                      1e-5 * (1.0 + mid.control[i].uDot.norm()));

                const Vec3 uDdotFd =
                    (dp.control[i].uDot - dm.control[i].uDot) / (2.0 * hStep);
                CHECK((uDdotFd - mid.control[i].uDdot).norm() <=
                      1e-5 * (1.0 + mid.control[i].uDdot.norm()));

                const Vec3 omegaCFd = quatRateToBodyRate(
                    mid.control[i].cmd.Qc,
                    {(dp.control[i].cmd.Qc.w - dm.control[i].cmd.Qc.w) / (2.0 * hStep),
                     (dp.control[i].cmd.Qc.q - dm.control[i].cmd.Qc.q) / (2.0 * hStep)});
                CHECK((omegaCFd - mid.control[i].cmd.omegaC).norm() <=
                      1e-4 * (1.0 + mid.control[i].cmd.omegaC.norm()));
            }
        }
        state = engine.rk4Step(t, state, dt);
        t = static_cast<double>(step + 1) * dt;
    }
}

TEST_CASE("r-dynamics along the simulated flow match J rdot = -k_q r") {
    ScenarioConfig config = referenceConfig();
    config.sim.sgnMode = SgnMode::Smoothed;
    config.sim.dt = 1e-4;
    const SimEngine engine(config);
    const GainSet& g = config.gains;
    const Vec3 jInv{1.0 / 4.856e-2, 1.0 / 4.856e-2, 1.0 / 8.801e-2};

    const auto slidingOf = [&](const DerivativeResult& d, std::size_t i) {
        return d.control[i].aerr.Qe.q * g.l_q + d.control[i].aerr.omegaE;
    };

    FullState state = engine.initialState();
    const double dt = config.sim.dt;
    double t = 0.0;
    // sample through the initial transient where r is appreciably nonzero
    for (long step = 0; step < 2000; ++step) {
        if (step % 100 == 50) {
            const DerivativeResult mid = engine.derivative(t, state);
            const FullState plus = engine.rk4Step(t, state, dt);
            const FullState minus = engine.rk4Step(t, state, -dt);
            const DerivativeResult dp = engine.derivative(t + dt, plus);
            const DerivativeResult dm = engine.derivative(t - dt, minus);
            for (std::size_t i = 0; i < 4; ++i) {
                const Vec3 rdotFd = (slidingOf(dp, i) - slidingOf(dm, i)) / (2.0 * dt);
                const Vec3 expected = slidingOf(mid, i).cwise(jInv) * (-g.k_q);
                CHECK((rdotFd - expected).norm() <= 1e-3 * (1.0 + expected.norm()));
            }
        }
        state = engine.rk4Step(t, state, dt);
        t = static_cast<double>(step + 1) * dt;
    }
}

TEST_CASE("frozen estimator and perfect attitude reduce to the nominal error dynamics") {
    // single follower, stationary leader at the origin, zero offset
    const std::string text = R"(
[graph]
n = 1
edges = [[0, 1, 1.0]]
[gains]
k_p = 8.0
k_v = 8.0
k_a = 4.0
l_a = 12.0
k_gamma = 0.5
k_eta = 4.0
l_p = 4.0
l_v = 4.0
l_q = 16.0
k_q = 16.0
[leader]
type = "point"
position = [0.0, 0.0, 0.0]
[sim]
dt = 0.001
t_end = 1.0
[[vehicle]]
mass = 0.85
inertia = [0.04856, 0.04856, 0.08801]
position = [0.4, -0.3, 0.2]
velocity = [0.1, 0.05, -0.1]
delta = [0.0, 0.0, 0.0]
)";
    ScenarioConfig config = ScenarioConfig::fromString(text);
    const SimEngine engine(config);
    FullState state = engine.initialState();

    // perfect attitude: align the vehicle with the current command
    {
        const DerivativeResult d0 = engine.derivative(0.0, state);
        state.nodes[0].vehicle.Q = d0.control[0].cmd.Qc;
    }
    const DerivativeResult d = engine.derivative(0.0, state);
    const GainSet& g = config.gains;
    const VirtualErrors& ve = d.control[0].errors;

    // d/dt vTildeE = vehicle accel - vHatDot - etaDdot
    const Vec3 vTildeDot =
        d.rates.nodes[0].vehicle.vDot - d.rates.nodes[0].estimator.vHatDot -
        d.control[0].etaDdot;
    const Vec3 nominal = ve.pTildeE * (-g.l_p) + ve.vTildeE * (-g.l_v);
    CHECK((vTildeDot - nominal).norm() <= 1e-12 * (1.0 + nominal.norm()));
}
