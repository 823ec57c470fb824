#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vtolsim/csv.hpp"
#include "vtolsim/engine.hpp"
#include "vtolsim/scenario.hpp"
#include "vtolsim/svg_plot.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParseError = 1;
constexpr int kExitValidationFailed = 2;
constexpr int kExitRuntimeAbort = 3;

std::vector<int> parseNodeList(const std::string& spec) {
    std::vector<int> nodes;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        int id = 0;
        try {
            id = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size())
            throw std::runtime_error("--nodes expects comma-separated integers, got '" + item +
                                     "'");
        nodes.push_back(id);
    }
    return nodes;
}

void writeFile(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

int runValidate(const std::string& configPath) {
    vtolsim::ScenarioConfig config;
    try {
        config = vtolsim::ScenarioConfig::fromFile(configPath);
    } catch (const std::exception& ex) {
        std::cerr << "parse error: " << ex.what() << "\n";
        return kExitParseError;
    }
    const vtolsim::ScenarioReport report = vtolsim::validateScenario(config);
    std::cout << vtolsim::formatReport(report);
    if (!report.allOk()) {
        std::cout << "validation: FAILED\n";
        return kExitValidationFailed;
    }
    std::cout << "validation: ok\n";
    return kExitOk;
}

int runSimulation(const std::string& configPath, const std::string& outDir,
                  std::optional<double> dtOverride, std::optional<double> tEndOverride,
                  std::optional<std::string> sgnOverride, std::optional<double> epsOverride) {
    vtolsim::ScenarioConfig config;
    try {
        config = vtolsim::ScenarioConfig::fromFile(configPath);
        if (dtOverride) config.sim.dt = *dtOverride;
        if (tEndOverride) config.sim.tEnd = *tEndOverride;
        if (epsOverride) config.sim.eps = *epsOverride;
        if (sgnOverride) {
            if (*sgnOverride == "exact")
                config.sim.sgnMode = vtolsim::SgnMode::Exact;
            else if (*sgnOverride == "smoothed")
                config.sim.sgnMode = vtolsim::SgnMode::Smoothed;
            else
                throw vtolsim::ConfigError("--sgn must be exact or smoothed");
        }
        if (!(config.sim.dt > 0.0)) throw vtolsim::ConfigError("dt must be > 0");
        if (!(config.sim.tEnd >= 0.0)) throw vtolsim::ConfigError("t_end must be >= 0");
    } catch (const std::exception& ex) {
        std::cerr << "parse error: " << ex.what() << "\n";
        return kExitParseError;
    }

    const vtolsim::ScenarioReport scen = vtolsim::validateScenario(config);
    if (!scen.structuralOk()) {
        std::cerr << vtolsim::formatReport(scen);
        std::cerr << "scenario is structurally invalid; refusing to run\n";
        return kExitValidationFailed;
    }
    for (const auto& c : scen.gainReport.conditions)
        if (!c.pass)
            std::cerr << "warning: gain condition not satisfied: " << c.name
                      << " (margin " << c.margin << ")\n";

    std::filesystem::create_directories(outDir);
    const std::string csvPath = (std::filesystem::path(outDir) / "log.csv").string();
    const std::string reportPath = (std::filesystem::path(outDir) / "report.txt").string();

    try {
        const vtolsim::SimEngine engine(config);
        const vtolsim::RunResult result = engine.run(csvPath, reportPath);
        const auto& rep = result.report;
        std::cout << "wrote " << csvPath << " (" << result.log.rows() << " rows) and "
                  << reportPath << "\n";
        std::cout << "sgn mode: " << rep.sgnMode << "\n";
        std::cout << "min singularity margin: " << rep.minSingularityMargin << "\n";
        std::cout << "max thrust: " << rep.maxThrust << " (bound " << rep.thrustBound << ")\n";
        for (std::size_t i = 0; i < rep.finalPosErr.size(); ++i)
            std::cout << "node " << (i + 1) << " final errors: pos=" << rep.finalPosErr[i]
                      << " m, vel=" << rep.finalVelErr[i] << " m/s\n";
        return kExitOk;
    } catch (const vtolsim::SimAbortError& ex) {
        std::cerr << "simulation aborted: " << ex.what() << "\n";
        return kExitRuntimeAbort;
    }
}

int runPlot(const std::string& logPath, const std::string& outDir, const std::string& nodeSpec) {
    vtolsim::CsvTable table;
    try {
        table = vtolsim::readCsv(logPath);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitParseError;
    }
    try {
        const std::vector<int> nodes =
            vtolsim::resolveNodeSelection(table, parseNodeList(nodeSpec));
        std::filesystem::create_directories(outDir);
        const std::filesystem::path dir(outDir);
        writeFile(dir / "trajectory.svg", vtolsim::renderTrajectorySvg(table, nodes));
        writeFile(dir / "position_error.svg",
                  vtolsim::renderSeriesSvg(table, nodes, "err_track_p",
                                           "Position error of follower UAVs", "[m]"));
        writeFile(dir / "velocity_error.svg",
                  vtolsim::renderSeriesSvg(table, nodes, "err_track_v",
                                           "Velocity error of follower UAVs", "[m/s]"));
        std::cout << "wrote trajectory.svg, position_error.svg, velocity_error.svg in "
                  << outDir << "\n";
        return kExitOk;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitValidationFailed;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-VTOL leader-follower formation simulator"};
    app.require_subcommand(1);

    std::string configPath, outDir = ".", logPath, nodeSpec;
    std::optional<double> dtOverride, tEndOverride, epsOverride;
    std::optional<std::string> sgnOverride;

    CLI::App* validate = app.add_subcommand("validate", "check a scenario file and the gain "
                                                        "conditions; exit 2 on failures");
    validate->add_option("--config", configPath, "scenario file")->required();

    CLI::App* run = app.add_subcommand("run", "simulate a scenario and write log.csv + "
                                              "report.txt");
    run->add_option("--config", configPath, "scenario file")->required();
    run->add_option("--out-dir", outDir, "output directory (default .)");
    run->add_option("--dt", dtOverride, "integration step override [s]");
    run->add_option("--t-end", tEndOverride, "duration override [s]");
    run->add_option("--sgn", sgnOverride, "sgn mode override: exact | smoothed");
    run->add_option("--eps", epsOverride, "boundary-layer width for smoothed sgn");

    CLI::App* plot = app.add_subcommand("plot", "render SVG figures from a log");
    plot->add_option("--log", logPath, "log.csv produced by run")->required();
    plot->add_option("--out-dir", outDir, "output directory (default .)");
    plot->add_option("--nodes", nodeSpec, "comma-separated node ids (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitParseError : kExitOk;
    }

    if (validate->parsed()) return runValidate(configPath);
    if (run->parsed())
        return runSimulation(configPath, outDir, dtOverride, tEndOverride, sgnOverride,
                             epsOverride);
    return runPlot(logPath, outDir, nodeSpec);
}
