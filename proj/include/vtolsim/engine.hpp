#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vtolsim/controller.hpp"
#include "vtolsim/estimator.hpp"
#include "vtolsim/scenario.hpp"
#include "vtolsim/vehicle.hpp"

namespace vtolsim {

/// A simulation abort with diagnostic context (node id, time).
class SimAbortError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NodeState {
    VehicleState vehicle;
    EstimatorState estimator;
    AuxiliaryState aux;
};

struct FullState {
    std::vector<NodeState> nodes;
};

struct NodeRates {
    VehicleRates vehicle;
    EstimatorRates estimator;
    Vec3 gammaDot{};  // rate of gamma: the stage state's own gammaDot
    Vec3 etaDot{};    // rate of eta: the stage state's own etaDot
    Vec3 etaDdot{};
};

struct FullRates {
    std::vector<NodeRates> nodes;
};

FullState addScaled(const FullState& x, const FullRates& k, double h);

/// Per-node controller quantities from one derivative evaluation.
struct ControlOutputs {
    VirtualErrors errors{};
    Vec3 etaDdot{};
    Vec3 h1{}, h2{};
    Vec3 u{}, uDot{}, uDdot{};
    Vec3 etaDddot{};
    double thrust = 0.0;
    Vec3 tau{};
    AttitudeCommand cmd{};
    AttitudeError aerr{};
    double singularityMargin = 0.0;  // u_z - (g - k_gamma - 2 k_eta)
};

struct DerivativeResult {
    FullRates rates;
    std::vector<ControlOutputs> control;
};

/// Time-indexed record of every logged signal; one flat row per sample.
class SimLog {
public:
    std::vector<std::string> header;

    void addRow(const std::vector<double>& row);
    std::size_t rows() const { return header.empty() ? 0 : data_.size() / header.size(); }
    std::size_t cols() const { return header.size(); }
    double at(std::size_t row, std::size_t col) const { return data_[row * cols() + col]; }
    /// Column index by exact name; -1 when absent.
    int columnIndex(const std::string& name) const;
    const std::vector<double>& raw() const { return data_; }

private:
    std::vector<double> data_;
};

struct RunReport {
    bool spanningTree = false;
    GainValidationReport gains;
    double minSingularityMargin = 0.0;
    double maxThrust = 0.0;
    double thrustBound = 0.0;  // m_max (g + 2 sqrt(3) k_eta + sqrt(3) k_gamma)
    double minGammaBarEntry = 1.0;
    long steps = 0;
    double dt = 0.0;
    double tEnd = 0.0;
    std::string sgnMode;
    /// Final ||p_i - p_r - delta_i|| and ||v_i - p_r_dot|| per node.
    std::vector<double> finalPosErr;
    std::vector<double> finalVelErr;
};

struct RunResult {
    SimLog log;
    RunReport report;
};

/// Couples the leader, the per-node estimators and controllers, and the
/// rigid-body plants into one deterministic fixed-step simulation.
class SimEngine {
public:
    explicit SimEngine(ScenarioConfig config);

    const ScenarioConfig& config() const { return config_; }

    FullState initialState() const;

    /// One consistent evaluation of every rate at (t, state); all nodes read
    /// the same snapshot. Throws SimAbortError on singular commands or
    /// non-finite states.
    DerivativeResult derivative(double t, const FullState& state) const;

    /// Classic RK4 update of the stacked state; quaternions renormalized
    /// after the step.
    FullState rk4Step(double t, const FullState& state, double dt) const;

    /// Run the configured scenario. When paths are given, writes the CSV log
    /// and the text run report. Deterministic: identical configs produce
    /// byte-identical outputs.
    RunResult run(const std::optional<std::string>& csvPath = std::nullopt,
                  const std::optional<std::string>& reportPath = std::nullopt) const;

    std::vector<std::string> logHeader() const;
    std::vector<double> logRow(double t, const FullState& state,
                               const std::vector<ControlOutputs>& ctrl) const;

private:
    ScenarioConfig config_;
    MatN m_;
};

}  // namespace vtolsim
