// Acceptance suite: exercises the shipped four-follower scenario end to end
// and prints one PASS/FAIL line per criterion.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "vtolsim/controller.hpp"
#include "vtolsim/engine.hpp"
#include "vtolsim/graph.hpp"
#include "vtolsim/rk4.hpp"
#include "vtolsim/scenario.hpp"
#include "vtolsim/vehicle.hpp"

using namespace vtolsim;

namespace {

std::string scenarioPath() {
    return std::string(VTOLSIM_SCENARIO_DIR) + "/helix_square.toml";
}

void verdict(int criterion, bool pass, const std::string& what) {
    std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", what.c_str());
    std::fflush(stdout);
}

struct TrackingCheck {
    double worstPosAfter60 = 0.0;
    double worstVelAfter60 = 0.0;
    double finalPos = 0.0;
    double finalVel = 0.0;
    double worstEstErrAfter40 = 0.0;  // max over pBar, vBar, aBar norms
};

TrackingCheck scanLog(const SimLog& log, std::size_t nodes) {
    TrackingCheck out;
    const int tCol = log.columnIndex("t");
    REQUIRE(tCol >= 0);
    for (std::size_t node = 1; node <= nodes; ++node) {
        const std::string p = "n" + std::to_string(node) + "_";
        const int px = log.columnIndex(p + "err_track_p_x");
        const int vx = log.columnIndex(p + "err_track_v_x");
        const int ep = log.columnIndex(p + "err_p_x");
        const int ev = log.columnIndex(p + "err_v_x");
        const int ea = log.columnIndex(p + "err_a_x");
        REQUIRE(px >= 0);
        REQUIRE(ev >= 0);
        for (std::size_t r = 0; r < log.rows(); ++r) {
            const double t = log.at(r, tCol);
            const auto norm3 = [&](int c) {
                return Vec3{log.at(r, c), log.at(r, c + 1), log.at(r, c + 2)}.norm();
            };
            if (t >= 60.0) {
                out.worstPosAfter60 = std::max(out.worstPosAfter60, norm3(px));
                out.worstVelAfter60 = std::max(out.worstVelAfter60, norm3(vx));
            }
            if (t >= 40.0) {
                out.worstEstErrAfter40 = std::max({out.worstEstErrAfter40, norm3(ep),
                                                   norm3(ev), norm3(ea)});
            }
            if (r + 1 == log.rows()) {
                out.finalPos = std::max(out.finalPos, norm3(px));
                out.finalVel = std::max(out.finalVel, norm3(vx));
            }
        }
    }
    return out;
}

std::mt19937_64 rng(240601);

Vec3 randomVec(double scale) {
    std::uniform_real_distribution<double> d(-scale, scale);
    return {d(rng), d(rng), d(rng)};
}

UnitQuaternion randomUnitQuat() {
    std::normal_distribution<double> d(0.0, 1.0);
    return UnitQuaternion{d(rng), {d(rng), d(rng), d(rng)}}.normalized();
}

struct ReferenceRuns {
    RunResult exact;
    RunResult smoothed;
    static const ReferenceRuns& get() {
        static const ReferenceRuns runs = [] {
            ReferenceRuns r;
            ScenarioConfig cfg = ScenarioConfig::fromFile(scenarioPath());
            r.exact = SimEngine(cfg).run();
            cfg.sim.sgnMode = SgnMode::Smoothed;
            r.smoothed = SimEngine(cfg).run();
            return r;
        }();
        return runs;
    }
};

}  // namespace

TEST_CASE("criterion 1: four-follower reproduction at desk scale") {
    const auto& runs = ReferenceRuns::get();
    const TrackingCheck exact = scanLog(runs.exact.log, 4);
    const TrackingCheck smooth = scanLog(runs.smoothed.log, 4);

    const bool boundsExact = exact.worstPosAfter60 <= 0.05 && exact.worstVelAfter60 <= 0.05;
    const bool boundsSmooth = smooth.worstPosAfter60 <= 0.05 && smooth.worstVelAfter60 <= 0.05;
    const bool finalSmooth = smooth.finalPos <= 1e-3 && smooth.finalVel <= 1e-3;

    std::ostringstream what;
    what << "exact mode max errors after 60 s: pos=" << exact.worstPosAfter60
         << " vel=" << exact.worstVelAfter60
         << "; smoothed after 60 s: pos=" << smooth.worstPosAfter60
         << " vel=" << smooth.worstVelAfter60 << "; smoothed at 100 s: pos=" << smooth.finalPos
         << " vel=" << smooth.finalVel;
    const bool pass = boundsExact && boundsSmooth && finalSmooth;
    verdict(1, pass, what.str());
    CHECK(boundsExact);
    CHECK(boundsSmooth);
    CHECK(finalSmooth);
}

TEST_CASE("criterion 2: estimator convergence") {
    const auto& runs = ReferenceRuns::get();
    const TrackingCheck exact = scanLog(runs.exact.log, 4);
    const TrackingCheck smooth = scanLog(runs.smoothed.log, 4);
    const bool pass = exact.worstEstErrAfter40 <= 1e-2 && smooth.worstEstErrAfter40 <= 1e-2;
    std::ostringstream what;
    what << "max estimation error after 40 s: exact=" << exact.worstEstErrAfter40
         << " smoothed=" << smooth.worstEstErrAfter40;
    verdict(2, pass, what.str());
    CHECK(pass);
}

TEST_CASE("criterion 3: thrust bound holds at every step") {
    const auto& runs = ReferenceRuns::get();
    const double bound = 0.85 * (9.81 + 2.0 * std::sqrt(3.0) * 4.0 + std::sqrt(3.0) * 0.5);
    const bool pass =
        runs.exact.report.maxThrust <= bound && runs.smoothed.report.maxThrust <= bound;
    std::ostringstream what;
    what << "max thrust exact=" << runs.exact.report.maxThrust
         << " smoothed=" << runs.smoothed.report.maxThrust << " bound=" << bound;
    verdict(3, pass, what.str());
    CHECK(pass);
}

TEST_CASE("criterion 4: singularity margin stays positive") {
    const auto& runs = ReferenceRuns::get();
    const double floor = 9.81 - 0.5 - 2.0 * 4.0;  // 1.31
    const bool pass = runs.exact.report.minSingularityMargin >= 0.0 &&
                      runs.smoothed.report.minSingularityMargin >= 0.0;
    std::ostringstream what;
    what << "min u_z - " << floor << ": exact=" << runs.exact.report.minSingularityMargin
         << " smoothed=" << runs.smoothed.report.minSingularityMargin;
    verdict(4, pass, what.str());
    CHECK(pass);
}

TEST_CASE("criterion 5: closed-loop torque identity") {
    GainSet gains;
    const Vec3 inertia{4.856e-2, 4.856e-2, 8.801e-2};
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const UnitQuaternion q = randomUnitQuat();
        const UnitQuaternion qc = randomUnitQuat();
        const Vec3 w = randomVec(5.0), wc = randomVec(5.0), wcDot = randomVec(10.0);

        const AttitudeError err = attitudeError(q, qc, w, wc);
        const Vec3 tau = appliedTorque(err, w, wc, wcDot, inertia, gains);
        const Mat3 re = quatToRotation(err.Qe);
        const Vec3 jwDotE = -w.cross(w.cwise(inertia)) + tau +
                            (err.omegaE.cross(re * wc) - re * wcDot).cwise(inertia);
        const Vec3 qeDot = (err.omegaE * err.Qe.w + err.Qe.q.cross(err.omegaE)) * 0.5;
        const Vec3 r = err.Qe.q * gains.l_q + err.omegaE;
        const Vec3 jrDot = qeDot.cwise(inertia) * gains.l_q + jwDotE;
        worst = std::max(worst, (jrDot + r * gains.k_q).norm() / (1.0 + r.norm()));
    }
    const bool pass = worst <= 1e-9;
    std::ostringstream what;
    what << "worst |J rdot + k_q r| / (1 + |r|) over 1000 states: " << worst;
    verdict(5, pass, what.str());
    CHECK(pass);
}

TEST_CASE("criterion 6: extraction identities") {
    double worstAlign = 0.0, worstNorm = 0.0;
    long tested = 0;
    while (tested < 100000) {
        const Vec3 u = randomVec(25.0);
        if (u.x == 0.0 && u.y == 0.0 && u.z <= 0.0) continue;
        ++tested;
        const UnitQuaternion qc = extractAttitude(u);
        worstNorm = std::max(worstNorm, std::fabs(qc.norm() - 1.0));
        worstAlign =
            std::max(worstAlign, (quatToRotation(qc) * e3() - u / u.norm()).norm());
    }
    bool throws = true;
    std::uniform_real_distribution<double> neg(-30.0, 0.0);
    for (int i = 0; i < 1000; ++i) {
        try {
            extractAttitude({0.0, 0.0, neg(rng)});
            throws = false;
        } catch (const SingularCommandError&) {
        }
    }
    try {
        extractAttitude({0.0, 0.0, 0.0});
        throws = false;
    } catch (const SingularCommandError&) {
    }

    const bool pass = worstAlign <= 1e-12 && worstNorm <= 1e-12 && throws;
    std::ostringstream what;
    what << "worst |R(Qc) e3 - u/|u||=" << worstAlign << ", worst norm defect=" << worstNorm
         << ", singular set always throws: " << (throws ? "yes" : "no");
    verdict(6, pass, what.str());
    CHECK(pass);
}

namespace {

std::mt19937_64 graphRng(424242);

CommGraph randomSpanningTreeGraph(std::size_t n) {
    std::uniform_real_distribution<double> weight(0.2, 3.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    CommGraph g(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> parent(0, i);
        const std::size_t p = parent(graphRng);
        if (p == 0)
            g.d0[i] = weight(graphRng);
        else
            g.d(i, p - 1) = weight(graphRng);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && coin(graphRng) < 0.2) g.d(i, j) = weight(graphRng);
        if (coin(graphRng) < 0.2) g.d0[i] = weight(graphRng);
    }
    return g;
}

CommGraph randomDisconnectedGraph(std::size_t n) {
    while (true) {
        std::uniform_real_distribution<double> weight(0.2, 3.0);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        CommGraph g(n);
        const std::size_t cut = n / 2 + 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (i < cut && coin(graphRng) < 0.7) g.d0[i] = weight(graphRng);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                if ((i < cut || j >= cut) && coin(graphRng) < 0.3) g.d(i, j) = weight(graphRng);
            }
        }
        if (!hasDirectedSpanningTree(g)) return g;
    }
}

}  // namespace

TEST_CASE("criterion 7: graph certificate property suite") {
    std::uniform_int_distribution<std::size_t> sizes(1, 8);
    bool pass = true;
    for (int trial = 0; trial < 200 && pass; ++trial) {
        const CommGraph g = randomSpanningTreeGraph(sizes(graphRng));
        if (!hasDirectedSpanningTree(g)) {
            pass = false;
            break;
        }
        const GraphCertificate cert = buildCertificate(g);
        for (double t : cert.theta) pass = pass && t > 0.0;
        pass = pass && cert.lambdaMinXi > 0.0;
        for (std::size_t i = 0; i < g.n && pass; ++i) {
            double off = 0.0;
            for (std::size_t j = 0; j < g.n; ++j)
                if (j != i) off += std::fabs(cert.xi(i, j));
            pass = pass && cert.xi(i, i) > off;
        }
    }
    std::uniform_int_distribution<std::size_t> sizes2(2, 8);
    int singularDetected = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const CommGraph g = randomDisconnectedGraph(sizes2(graphRng));
        try {
            thetaWeights(mMatrix(g));
        } catch (const std::runtime_error&) {
            ++singularDetected;
        }
    }
    pass = pass && singularDetected == 50;
    std::ostringstream what;
    what << "200 spanning-tree graphs certified; " << singularDetected
         << "/50 rootless graphs rejected as singular";
    verdict(7, pass, what.str());
    CHECK(pass);
}

TEST_CASE("criterion 8: derivative oracles along the reference trajectory") {
    ScenarioConfig cfg = ScenarioConfig::fromFile(scenarioPath());
    cfg.sim.sgnMode = SgnMode::Smoothed;
    const SimEngine engine(cfg);

    FullState state = engine.initialState();
    const double dt = cfg.sim.dt;
    const double hStep = 1e-6;
    const double samples[] = {0.5, 1.5, 3.0, 6.0, 12.0, 25.0};
    std::size_t next = 0;
    double worstU = 0.0, worstUd = 0.0, worstW = 0.0;
    double t = 0.0;
    for (long step = 0; next < std::size(samples); ++step) {
        if (t >= samples[next] - 0.5 * dt) {
            ++next;
            const DerivativeResult mid = engine.derivative(t, state);
            const FullState plus = engine.rk4Step(t, state, hStep);
            const FullState minus = engine.rk4Step(t, state, -hStep);
            const DerivativeResult dp = engine.derivative(t + hStep, plus);
            const DerivativeResult dm = engine.derivative(t - hStep, minus);
            for (std::size_t i = 0; i < 4; ++i) {
                const Vec3 uDotFd = (dp.control[i].u - dm.control[i].u) / (2.0 * hStep);
                worstU = std::max(worstU, (uDotFd - mid.control[i].uDot).norm() /
                                              (1.0 + mid.control[i].uDot.norm()));
                const Vec3 uDdotFd =
                    (dp.control[i].uDot - dm.control[i].uDot) / (2.0 * hStep);
                worstUd = std::max(worstUd, (uDdotFd - mid.control[i].uDdot).norm() /
                                                (1.0 + mid.control[i].uDdot.norm()));
                const QuatRate qcFd{
                    (dp.control[i].cmd.Qc.w - dm.control[i].cmd.Qc.w) / (2.0 * hStep),
                    (dp.control[i].cmd.Qc.q - dm.control[i].cmd.Qc.q) / (2.0 * hStep)};
                const Vec3 wFd = quatRateToBodyRate(mid.control[i].cmd.Qc, qcFd);
                worstW = std::max(worstW, (wFd - mid.control[i].cmd.omegaC).norm() /
                                              (1.0 + mid.control[i].cmd.omegaC.norm()));
            }
        }
        state = engine.rk4Step(t, state, dt);
        t = static_cast<double>(step + 1) * dt;
    }
    const bool pass = worstU <= 1e-4 && worstUd <= 1e-4 && worstW <= 1e-4;
    std::ostringstream what;
    what << "worst relative FD residuals: u_dot=" << worstU << " u_ddot=" << worstUd
         << " omega_c=" << worstW;
    verdict(8, pass, what.str());
    CHECK(pass);
}

TEST_CASE("criterion 9: byte-identical reruns") {
    ScenarioConfig cfg = ScenarioConfig::fromFile(scenarioPath());
    cfg.sim.tEnd = 2.0;
    SimEngine engine(cfg);
    engine.run(std::string("acc_det_a.csv"));
    engine.run(std::string("acc_det_b.csv"));
    const auto slurp = [](const char* p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    const std::string a = slurp("acc_det_a.csv"), b = slurp("acc_det_b.csv");
    const bool pass = !a.empty() && a == b;
    std::ostringstream what;
    what << "two 2 s runs, " << a.size() << " bytes each, identical: " << (pass ? "yes" : "no");
    verdict(9, pass, what.str());
    CHECK(pass);
}

namespace {

VehicleState vehAxpy(const VehicleState& s, const VehicleRates& r, double h) {
    VehicleState o;
    o.p = s.p + r.pDot * h;
    o.v = s.v + r.vDot * h;
    o.Q.w = s.Q.w + r.qDot.w * h;
    o.Q.q = s.Q.q + r.qDot.q * h;
    o.omega = s.omega + r.omegaDot * h;
    return o;
}

VehicleState freeRigidBody(double dt, double tEnd) {
    const VehicleParams params;
    VehicleState s;
    s.omega = {1.0, 2.0, 3.0};
    const auto f = [&](double, const VehicleState& x) {
        return vehicleDerivative(x, ControlInput{0.0, {}}, params);
    };
    const long steps = std::lround(tEnd / dt);
    for (long i = 0; i < steps; ++i) {
        s = rk4Step(f, vehAxpy, i * dt, s, dt);
        s.Q = s.Q.normalized();
    }
    return s;
}

}  // namespace

TEST_CASE("criterion 10: integrator order on the free rigid body") {
    const double dt = 0.02, tEnd = 2.0;
    const VehicleState ref = freeRigidBody(dt / 64.0, tEnd);
    const auto dist = [](const VehicleState& a, const VehicleState& b) {
        const double dq = std::sqrt((a.Q.w - b.Q.w) * (a.Q.w - b.Q.w) +
                                    (a.Q.q - b.Q.q).squaredNorm());
        return dq + (a.omega - b.omega).norm();
    };
    const double e1 = dist(freeRigidBody(dt, tEnd), ref);
    const double e2 = dist(freeRigidBody(dt / 2.0, tEnd), ref);
    const double ratio = e1 / e2;
    const bool pass = ratio >= 12.0 && ratio <= 20.0;
    std::ostringstream what;
    what << "global error ratio err(dt)/err(dt/2) = " << ratio << " (errors " << e1 << ", "
         << e2 << ")";
    verdict(10, pass, what.str());
    CHECK(pass);
}
