#include "vtolsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace vtolsim {

FullState addScaled(const FullState& x, const FullRates& k, double h) {
    FullState y;
    y.nodes.resize(x.nodes.size());
    for (std::size_t i = 0; i < x.nodes.size(); ++i) {
        const NodeState& s = x.nodes[i];
        const NodeRates& r = k.nodes[i];
        NodeState& o = y.nodes[i];
        o.vehicle.p = s.vehicle.p + r.vehicle.pDot * h;
        o.vehicle.v = s.vehicle.v + r.vehicle.vDot * h;
        o.vehicle.Q.w = s.vehicle.Q.w + r.vehicle.qDot.w * h;
        o.vehicle.Q.q = s.vehicle.Q.q + r.vehicle.qDot.q * h;
        o.vehicle.omega = s.vehicle.omega + r.vehicle.omegaDot * h;
        o.estimator.pHat = s.estimator.pHat + r.estimator.pHatDot * h;
        o.estimator.vHat = s.estimator.vHat + r.estimator.vHatDot * h;
        o.estimator.gamma = s.estimator.gamma + r.gammaDot * h;
        o.estimator.gammaDot = s.estimator.gammaDot + r.estimator.gammaDdot * h;
        o.aux.eta = s.aux.eta + r.etaDot * h;
        o.aux.etaDot = s.aux.etaDot + r.etaDdot * h;
    }
    return y;
}

void SimLog::addRow(const std::vector<double>& row) {
    data_.insert(data_.end(), row.begin(), row.end());
}

int SimLog::columnIndex(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

SimEngine::SimEngine(ScenarioConfig config) : config_(std::move(config)), m_(mMatrix(config_.graph)) {}

FullState SimEngine::initialState() const {
    FullState s;
    s.nodes.resize(config_.vehicles.size());
    for (std::size_t i = 0; i < s.nodes.size(); ++i)
        s.nodes[i].vehicle = config_.vehicles[i].initial;
    // estimator and auxiliary states start at zero
    return s;
}

DerivativeResult SimEngine::derivative(double t, const FullState& state) const {
    const std::size_t n = state.nodes.size();
    const GainSet& gains = config_.gains;
    const LeaderEval ld = config_.leader.evaluate(t);
    const CommGraph& graph = config_.graph;

    DerivativeResult out;
    out.rates.nodes.resize(n);
    out.control.resize(n);

    std::vector<Vec3> aH(n), aHd(n);
    for (std::size_t i = 0; i < n; ++i) {
        aH[i] = aHat(state.nodes[i].estimator.gamma, gains.k_gamma);
        aHd[i] = aHatDot(state.nodes[i].estimator.gamma, state.nodes[i].estimator.gammaDot,
                         gains.k_gamma);
    }

    for (std::size_t i = 0; i < n; ++i) {
        const NodeState& node = state.nodes[i];

        NeighborView view;
        for (std::size_t j = 0; j < n; ++j) {
            const double w = graph.d(i, j);
            if (w <= 0.0) continue;
            view.neighbors.push_back({state.nodes[j].estimator.pHat,
                                      state.nodes[j].estimator.vHat, aH[j], aHd[j], w});
        }
        if (graph.d0[i] > 0.0)
            view.leader = LeaderSample{ld.p, ld.v, ld.a, ld.jerk, graph.d0[i]};

        EstimatorRates estRates;
        try {
            estRates = estimatorDerivative(node.estimator, view, gains, config_.sim.sgnMode,
                                           config_.sim.eps);
        } catch (const std::exception& ex) {
            throw SimAbortError("node " + std::to_string(i + 1) + " at t=" + std::to_string(t) +
                                ": " + ex.what());
        }

        ControlOutputs& ctl = out.control[i];

        // perturbation sums via neighbor-relative differences only; these are
        // the estimator coupling terms that appear in the virtual error rates,
        // so they carry the estimator gains k_p and k_v
        Vec3 pDis{}, vDis{};
        for (std::size_t j = 0; j < n; ++j) {
            const double w = graph.d(i, j);
            if (w <= 0.0) continue;
            pDis += (node.estimator.pHat - state.nodes[j].estimator.pHat) * w;
            vDis += (node.estimator.vHat - state.nodes[j].estimator.vHat) * w;
        }
        if (graph.d0[i] > 0.0) {
            pDis += (node.estimator.pHat - ld.p) * graph.d0[i];
            vDis += (node.estimator.vHat - ld.v) * graph.d0[i];
        }
        const Vec3 h1 = pDis * gains.k_p;
        const Vec3 h2sum = vDis * gains.k_v;

        ctl.errors = virtualErrors(node.vehicle.p, node.vehicle.v, node.estimator, node.aux,
                                   config_.vehicles[i].delta);
        ctl.etaDdot = auxiliaryAcceleration(node.aux, ctl.errors.pTildeE, ctl.errors.vTildeE,
                                            gains);
        ctl.u = commandForce(node.estimator, node.aux, gains);
        ctl.singularityMargin = ctl.u.z - (gains.g - gains.k_gamma - 2.0 * gains.k_eta);

        UnitQuaternion qc;
        try {
            qc = extractAttitude(ctl.u);
        } catch (const SingularCommandError&) {
            throw SimAbortError("node " + std::to_string(i + 1) + " at t=" + std::to_string(t) +
                                ": command force entered the singular set");
        }
        ctl.thrust = thrustMagnitude(ctl.u, config_.vehicles[i].params.mass);

        ctl.h1 = h1;
        ctl.h2 = h2sum + (quatToRotation(node.vehicle.Q) - quatToRotation(qc)) * e3() *
                             ctl.u.norm();

        const Vec3 pTildeDot = ctl.errors.vTildeE + ctl.h1;
        const Vec3 vTildeDot = ctl.errors.pTildeE * (-gains.l_p) +
                               ctl.errors.vTildeE * (-gains.l_v) + ctl.h2;

        const ForceDerivatives fd = commandForceDerivatives(
            node.estimator.gamma, node.estimator.gammaDot, estRates.gammaDdot, node.aux.eta,
            node.aux.etaDot, ctl.etaDdot, pTildeDot, vTildeDot, gains);
        ctl.uDot = fd.uDot;
        ctl.uDdot = fd.uDdot;
        ctl.etaDddot = fd.etaDddot;

        ctl.cmd = commandRates(ctl.u, fd.uDot, fd.uDdot);
        ctl.aerr = attitudeError(node.vehicle.Q, ctl.cmd.Qc, node.vehicle.omega, ctl.cmd.omegaC);
        ctl.tau = appliedTorque(ctl.aerr, node.vehicle.omega, ctl.cmd.omegaC, ctl.cmd.omegaCDot,
                                config_.vehicles[i].params.inertiaDiag, gains);

        NodeRates& rates = out.rates.nodes[i];
        rates.estimator = estRates;
        rates.gammaDot = node.estimator.gammaDot;
        rates.etaDot = node.aux.etaDot;
        rates.etaDdot = ctl.etaDdot;
        rates.vehicle = vehicleDerivative(node.vehicle, {ctl.thrust, ctl.tau},
                                          config_.vehicles[i].params);
    }
    return out;
}

FullState SimEngine::rk4Step(double t, const FullState& state, double dt) const {
    const auto k1 = derivative(t, state);
    const auto k2 = derivative(t + 0.5 * dt, addScaled(state, k1.rates, 0.5 * dt));
    const auto k3 = derivative(t + 0.5 * dt, addScaled(state, k2.rates, 0.5 * dt));
    const auto k4 = derivative(t + dt, addScaled(state, k3.rates, dt));
    FullState y = addScaled(state, k1.rates, dt / 6.0);
    y = addScaled(y, k2.rates, dt / 3.0);
    y = addScaled(y, k3.rates, dt / 3.0);
    y = addScaled(y, k4.rates, dt / 6.0);
    for (NodeState& node : y.nodes) node.vehicle.Q = node.vehicle.Q.normalized();
    return y;
}

std::vector<std::string> SimEngine::logHeader() const {
    std::vector<std::string> h{"t", "pr_x", "pr_y", "pr_z"};
    const char* axes[3] = {"x", "y", "z"};
    for (std::size_t i = 1; i <= config_.vehicles.size(); ++i) {
        const std::string p = "n" + std::to_string(i) + "_";
        const auto vec = [&](const char* base) {
            for (const char* ax : axes) h.push_back(p + base + "_" + ax);
        };
        const auto quat = [&](const char* base) {
            for (const char* c : {"w", "x", "y", "z"}) h.push_back(p + base + "_" + c);
        };
        vec("p");
        vec("v");
        quat("q");
        vec("w");
        vec("p_hat");
        vec("v_hat");
        vec("a_hat");
        vec("err_p");
        vec("err_v");
        vec("err_a");
        vec("s");
        vec("u");
        h.push_back(p + "T");
        vec("tau");
        quat("Qc");
        quat("Qe");
        vec("omega_e");
        vec("eta");
        h.push_back(p + "sing_margin");
        vec("err_track_p");
        vec("err_track_v");
    }
    return h;
}

namespace {

void pushVec(std::vector<double>& row, const Vec3& v) {
    row.push_back(v.x);
    row.push_back(v.y);
    row.push_back(v.z);
}

void pushQuat(std::vector<double>& row, const UnitQuaternion& q) {
    row.push_back(q.w);
    pushVec(row, q.q);
}

}  // namespace

std::vector<double> SimEngine::logRow(double t, const FullState& state,
                                      const std::vector<ControlOutputs>& ctrl) const {
    const std::size_t n = state.nodes.size();
    const GainSet& gains = config_.gains;
    const LeaderEval ld = config_.leader.evaluate(t);

    std::vector<EstimatorState> ests;
    ests.reserve(n);
    for (const NodeState& node : state.nodes) ests.push_back(node.estimator);
    const EstimationErrors errs = estimationErrors(ests, gains.k_gamma, ld.p, ld.v, ld.a);

    std::vector<Vec3> aBarDot(n);
    for (std::size_t i = 0; i < n; ++i)
        aBarDot[i] =
            aHatDot(state.nodes[i].estimator.gamma, state.nodes[i].estimator.gammaDot,
                    gains.k_gamma) -
            ld.jerk;
    const std::vector<Vec3> s = slidingSurface(errs.aBar, aBarDot, m_, gains.l_a);

    std::vector<double> row;
    row.reserve(4 + n * 62);
    row.push_back(t);
    pushVec(row, ld.p);
    for (std::size_t i = 0; i < n; ++i) {
        const NodeState& node = state.nodes[i];
        const ControlOutputs& c = ctrl[i];
        pushVec(row, node.vehicle.p);
        pushVec(row, node.vehicle.v);
        pushQuat(row, node.vehicle.Q);
        pushVec(row, node.vehicle.omega);
        pushVec(row, node.estimator.pHat);
        pushVec(row, node.estimator.vHat);
        pushVec(row, aHat(node.estimator.gamma, gains.k_gamma));
        pushVec(row, errs.pBar[i]);
        pushVec(row, errs.vBar[i]);
        pushVec(row, errs.aBar[i]);
        pushVec(row, s[i]);
        pushVec(row, c.u);
        row.push_back(c.thrust);
        pushVec(row, c.tau);
        pushQuat(row, c.cmd.Qc);
        pushQuat(row, c.aerr.Qe);
        pushVec(row, c.aerr.omegaE);
        pushVec(row, node.aux.eta);
        row.push_back(c.singularityMargin);
        pushVec(row, node.vehicle.p - ld.p - config_.vehicles[i].delta);
        pushVec(row, node.vehicle.v - ld.v);
    }
    return row;
}

namespace {

std::string formatDouble(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void writeCsvRow(std::ofstream& out, const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << formatDouble(row[i]);
    }
    out << '\n';
}

}  // namespace

RunResult SimEngine::run(const std::optional<std::string>& csvPath,
                         const std::optional<std::string>& reportPath) const {
    const std::size_t n = config_.vehicles.size();
    const SimParams& sim = config_.sim;

    RunResult result;
    RunReport& rep = result.report;
    rep.spanningTree = hasDirectedSpanningTree(config_.graph);
    if (!rep.spanningTree)
        throw SimAbortError("scenario graph violates the spanning-tree assumption");
    {
        const ScenarioReport scen = validateScenario(config_);
        rep.gains = scen.gainReport;
    }
    rep.dt = sim.dt;
    rep.sgnMode = sim.sgnMode == SgnMode::Exact
                      ? "exact"
                      : "smoothed(eps=" + std::to_string(sim.eps) + ")";
    double mMax = 0.0;
    for (const auto& v : config_.vehicles) mMax = std::max(mMax, v.params.mass);
    rep.thrustBound = mMax * (config_.gains.g + 2.0 * std::sqrt(3.0) * config_.gains.k_eta +
                              std::sqrt(3.0) * config_.gains.k_gamma);
    rep.minSingularityMargin = std::numeric_limits<double>::infinity();
    rep.maxThrust = 0.0;
    rep.minGammaBarEntry = 1.0;

    const long steps = std::lround(sim.tEnd / sim.dt);
    rep.steps = steps;
    rep.tEnd = static_cast<double>(steps) * sim.dt;
    const long outputEvery = std::max(1L, std::lround(sim.outputPeriod / sim.dt));

    result.log.header = logHeader();

    std::ofstream csv;
    if (csvPath) {
        csv.open(*csvPath, std::ios::binary);
        if (!csv) throw SimAbortError("cannot open CSV output: " + *csvPath);
        for (std::size_t i = 0; i < result.log.header.size(); ++i) {
            if (i) csv << ',';
            csv << result.log.header[i];
        }
        csv << '\n';
    }

    FullState state = initialState();

    const auto updateStats = [&](const std::vector<ControlOutputs>& ctrl,
                                 const FullState& st, double t) {
        for (std::size_t i = 0; i < n; ++i) {
            rep.minSingularityMargin = std::min(rep.minSingularityMargin,
                                                ctrl[i].singularityMargin);
            rep.maxThrust = std::max(rep.maxThrust, ctrl[i].thrust);
            const Vec3 gb = sech2Vec(st.nodes[i].estimator.gamma);
            rep.minGammaBarEntry =
                std::min({rep.minGammaBarEntry, gb.x, gb.y, gb.z});
            // both bounds hold by construction; a violation beyond rounding
            // noise means the closed loop is broken
            if (ctrl[i].singularityMargin < -1e-9)
                throw SimAbortError("node " + std::to_string(i + 1) + " at t=" +
                                    std::to_string(t) + ": singularity margin " +
                                    std::to_string(ctrl[i].singularityMargin) + " < 0");
            if (ctrl[i].thrust > rep.thrustBound * (1.0 + 1e-9))
                throw SimAbortError("node " + std::to_string(i + 1) + " at t=" +
                                    std::to_string(t) + ": thrust " +
                                    std::to_string(ctrl[i].thrust) + " exceeds the bound " +
                                    std::to_string(rep.thrustBound));
        }
    };

    const auto checkFinite = [&](const FullState& st, double t) {
        for (std::size_t i = 0; i < n; ++i) {
            const NodeState& nd = st.nodes[i];
            if (!nd.vehicle.p.isFinite() || !nd.vehicle.v.isFinite() ||
                !nd.vehicle.Q.isFinite() || !nd.vehicle.omega.isFinite() ||
                !nd.estimator.pHat.isFinite() || !nd.estimator.vHat.isFinite() ||
                !nd.estimator.gamma.isFinite() || !nd.estimator.gammaDot.isFinite() ||
                !nd.aux.eta.isFinite() || !nd.aux.etaDot.isFinite())
                throw SimAbortError("node " + std::to_string(i + 1) + " at t=" +
                                    std::to_string(t) + ": state became non-finite");
        }
    };

    const auto emitRow = [&](double t, const FullState& st,
                             const std::vector<ControlOutputs>& ctrl) {
        const std::vector<double> row = logRow(t, st, ctrl);
        result.log.addRow(row);
        if (csvPath) writeCsvRow(csv, row);
    };

    for (long stepIdx = 0; stepIdx < steps; ++stepIdx) {
        const double t = static_cast<double>(stepIdx) * sim.dt;

        const DerivativeResult k1 = derivative(t, state);
        updateStats(k1.control, state, t);
        if (stepIdx % outputEvery == 0) emitRow(t, state, k1.control);

        const auto k2 =
            derivative(t + 0.5 * sim.dt, addScaled(state, k1.rates, 0.5 * sim.dt));
        const auto k3 =
            derivative(t + 0.5 * sim.dt, addScaled(state, k2.rates, 0.5 * sim.dt));
        const auto k4 = derivative(t + sim.dt, addScaled(state, k3.rates, sim.dt));
        FullState next = addScaled(state, k1.rates, sim.dt / 6.0);
        next = addScaled(next, k2.rates, sim.dt / 3.0);
        next = addScaled(next, k3.rates, sim.dt / 3.0);
        next = addScaled(next, k4.rates, sim.dt / 6.0);
        for (NodeState& node : next.nodes) node.vehicle.Q = node.vehicle.Q.normalized();
        checkFinite(next, static_cast<double>(stepIdx + 1) * sim.dt);
        state = std::move(next);
    }

    // final sample (also the only controller evaluation of the last state)
    if (steps > 0) {
        const double tf = rep.tEnd;
        const DerivativeResult kf = derivative(tf, state);
        updateStats(kf.control, state, tf);
        emitRow(tf, state, kf.control);
    }

    const LeaderEval ldEnd = config_.leader.evaluate(rep.tEnd);
    for (std::size_t i = 0; i < n; ++i) {
        rep.finalPosErr.push_back(
            (state.nodes[i].vehicle.p - ldEnd.p - config_.vehicles[i].delta).norm());
        rep.finalVelErr.push_back((state.nodes[i].vehicle.v - ldEnd.v).norm());
    }
    if (steps == 0) rep.minSingularityMargin = 0.0;

    if (reportPath) {
        std::ofstream out(*reportPath, std::ios::binary);
        if (!out) throw SimAbortError("cannot open report output: " + *reportPath);
        out << "run report\n";
        out << "sgn mode: " << rep.sgnMode << "\n";
        out << "dt: " << rep.dt << "  steps: " << rep.steps << "  t_end: " << rep.tEnd << "\n";
        out << "spanning tree rooted at leader: " << (rep.spanningTree ? "yes" : "NO") << "\n";
        out << "gain conditions:\n";
        for (const auto& c : rep.gains.conditions)
            out << "  " << (c.pass ? "[pass] " : "[FAIL] ") << c.name << "  margin=" << c.margin
                << "  (" << c.detail << ")\n";
        out << "leader bounds: sup|a|_inf=" << rep.gains.accelBoundInf
            << " sup||a||=" << rep.gains.accelBound2 << " N_p_bar=" << rep.gains.nPBar << "\n";
        out << "min singularity margin observed: " << rep.minSingularityMargin << "\n";
        out << "max thrust observed: " << rep.maxThrust << " (bound " << rep.thrustBound
            << ")\n";
        out << "min GammaBar entry observed: " << rep.minGammaBarEntry << "\n";
        for (std::size_t i = 0; i < n; ++i)
            out << "node " << (i + 1) << " final errors: pos=" << rep.finalPosErr[i]
                << " vel=" << rep.finalVelErr[i] << "\n";
    }
    return result;
}

}  // namespace vtolsim
