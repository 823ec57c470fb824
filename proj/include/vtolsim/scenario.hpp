#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vtolsim/estimator.hpp"
#include "vtolsim/graph.hpp"
#include "vtolsim/leader.hpp"
#include "vtolsim/vehicle.hpp"

namespace vtolsim {

/// Scenario-file problem: carries the line number when known.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
    ConfigError(int line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg) {}
};

struct VehicleConfig {
    VehicleParams params;
    VehicleState initial;
    Vec3 delta{};
};

struct SimParams {
    double dt = 1e-3;
    double tEnd = 100.0;
    double outputPeriod = 1e-2;
    SgnMode sgnMode = SgnMode::Exact;
    double eps = 1e-3;
};

struct ScenarioConfig {
    CommGraph graph{0};
    GainSet gains;
    LeaderTrajectory leader = LeaderTrajectory::point(Vec3{});
    std::vector<VehicleConfig> vehicles;
    SimParams sim;

    static ScenarioConfig fromFile(const std::string& path);
    static ScenarioConfig fromString(const std::string& text);
};

/// Structural checks plus the gain-condition report for a parsed scenario.
struct ScenarioReport {
    bool spanningTree = false;
    std::vector<std::string> structuralIssues;  // empty when structure is sound
    GainValidationReport gainReport;            // only meaningful with a spanning tree

    bool structuralOk() const { return structuralIssues.empty() && spanningTree; }
    bool allOk() const { return structuralOk() && gainReport.allPass(); }
};

ScenarioReport validateScenario(const ScenarioConfig& config);

/// Human-readable rendering of the report, one line per check.
std::string formatReport(const ScenarioReport& report);

}  // namespace vtolsim
