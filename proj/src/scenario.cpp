#include "vtolsim/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace vtolsim {

namespace {

// ---------------------------------------------------------------------------
// Minimal parser for the scenario format: [section] / [[section]] tables and
// key = value lines, where a value is a number, "string", boolean, or a
// (possibly nested) single-line array.
// ---------------------------------------------------------------------------

struct Value {
    enum class Type { Number, String, Bool, Array };
    Type type = Type::Number;
    double num = 0.0;
    std::string str;
    bool boolean = false;
    std::vector<Value> items;
    int line = 0;
};

using Table = std::map<std::string, Value>;

struct ParsedFile {
    std::map<std::string, Table> sections;
    std::map<std::string, std::vector<Table>> tableArrays;
    std::map<std::string, int> sectionLines;
};

void skipSpaces(const std::string& s, std::size_t& pos) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
}

Value parseValue(const std::string& s, std::size_t& pos, int line);

Value parseArray(const std::string& s, std::size_t& pos, int line) {
    Value v;
    v.type = Value::Type::Array;
    v.line = line;
    ++pos;  // consume '['
    skipSpaces(s, pos);
    if (pos < s.size() && s[pos] == ']') {
        ++pos;
        return v;
    }
    while (true) {
        v.items.push_back(parseValue(s, pos, line));
        skipSpaces(s, pos);
        if (pos >= s.size()) throw ConfigError(line, "unterminated array");
        if (s[pos] == ',') {
            ++pos;
            skipSpaces(s, pos);
            continue;
        }
        if (s[pos] == ']') {
            ++pos;
            return v;
        }
        throw ConfigError(line, "expected ',' or ']' in array");
    }
}

Value parseValue(const std::string& s, std::size_t& pos, int line) {
    skipSpaces(s, pos);
    if (pos >= s.size()) throw ConfigError(line, "missing value");
    Value v;
    v.line = line;
    const char c = s[pos];
    if (c == '[') return parseArray(s, pos, line);
    if (c == '"') {
        v.type = Value::Type::String;
        ++pos;
        while (pos < s.size() && s[pos] != '"') v.str.push_back(s[pos++]);
        if (pos >= s.size()) throw ConfigError(line, "unterminated string");
        ++pos;
        return v;
    }
    if (s.compare(pos, 4, "true") == 0) {
        v.type = Value::Type::Bool;
        v.boolean = true;
        pos += 4;
        return v;
    }
    if (s.compare(pos, 5, "false") == 0) {
        v.type = Value::Type::Bool;
        v.boolean = false;
        pos += 5;
        return v;
    }
    char* end = nullptr;
    v.num = std::strtod(s.c_str() + pos, &end);
    if (end == s.c_str() + pos) throw ConfigError(line, "could not parse value: '" + s + "'");
    pos = static_cast<std::size_t>(end - s.c_str());
    return v;
}

std::string stripComment(const std::string& line) {
    bool inString = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') inString = !inString;
        if (line[i] == '#' && !inString) return line.substr(0, i);
    }
    return line;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

ParsedFile parse(const std::string& text) {
    ParsedFile file;
    Table* current = nullptr;
    std::istringstream in(text);
    std::string raw;
    int lineNo = 0;
    while (std::getline(in, raw)) {
        ++lineNo;
        const std::string line = trim(stripComment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            const bool isArray = line.size() > 1 && line[1] == '[';
            const std::string close = isArray ? "]]" : "]";
            const std::size_t end = line.find(close);
            if (end == std::string::npos || trim(line.substr(end + close.size())) != "")
                throw ConfigError(lineNo, "malformed section header");
            const std::string name = trim(line.substr(isArray ? 2 : 1, end - (isArray ? 2 : 1)));
            if (name.empty()) throw ConfigError(lineNo, "empty section name");
            if (isArray) {
                file.tableArrays[name].emplace_back();
                current = &file.tableArrays[name].back();
            } else {
                if (file.sections.count(name))
                    throw ConfigError(lineNo, "duplicate section [" + name + "]");
                current = &file.sections[name];
                file.sectionLines[name] = lineNo;
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(lineNo, "expected 'key = value'");
        if (!current) throw ConfigError(lineNo, "key outside of any section");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(lineNo, "empty key");
        std::size_t pos = eq + 1;
        const Value v = parseValue(line, pos, lineNo);
        skipSpaces(line, pos);
        if (pos != line.size()) throw ConfigError(lineNo, "trailing characters after value");
        if (current->count(key)) throw ConfigError(lineNo, "duplicate key '" + key + "'");
        (*current)[key] = v;
    }
    return file;
}

// ---------------------------------------------------------------------------
// Field extraction helpers
// ---------------------------------------------------------------------------

void rejectUnknownKeys(const Table& t, const std::string& section,
                       std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : t) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known)
            throw ConfigError(value.line, "[" + section + "] unknown key '" + key + "'");
    }
}

const Value& require(const Table& t, const std::string& section, const std::string& key) {
    const auto it = t.find(key);
    if (it == t.end())
        throw ConfigError("[" + section + "] is missing key '" + key + "'");
    return it->second;
}

double requireNumber(const Table& t, const std::string& section, const std::string& key) {
    const Value& v = require(t, section, key);
    if (v.type != Value::Type::Number)
        throw ConfigError(v.line, "[" + section + "] key '" + key + "' must be a number");
    return v.num;
}

double numberOr(const Table& t, const std::string& section, const std::string& key,
                double fallback) {
    if (!t.count(key)) return fallback;
    return requireNumber(t, section, key);
}

std::string requireString(const Table& t, const std::string& section, const std::string& key) {
    const Value& v = require(t, section, key);
    if (v.type != Value::Type::String)
        throw ConfigError(v.line, "[" + section + "] key '" + key + "' must be a string");
    return v.str;
}

std::vector<double> numberList(const Value& v, const std::string& what) {
    if (v.type != Value::Type::Array)
        throw ConfigError(v.line, what + " must be an array of numbers");
    std::vector<double> out;
    for (const Value& item : v.items) {
        if (item.type != Value::Type::Number)
            throw ConfigError(v.line, what + " must contain only numbers");
        out.push_back(item.num);
    }
    return out;
}

Vec3 requireVec3(const Table& t, const std::string& section, const std::string& key) {
    const std::vector<double> xs =
        numberList(require(t, section, key), "[" + section + "] '" + key + "'");
    if (xs.size() != 3)
        throw ConfigError("[" + section + "] '" + key + "' must have exactly 3 entries");
    return {xs[0], xs[1], xs[2]};
}

Vec3 vec3Or(const Table& t, const std::string& section, const std::string& key,
            const Vec3& fallback) {
    if (!t.count(key)) return fallback;
    return requireVec3(t, section, key);
}

// ---------------------------------------------------------------------------
// Section builders
// ---------------------------------------------------------------------------

CommGraph buildGraph(const Table& t) {
    rejectUnknownKeys(t, "graph", {"n", "edges"});
    const double nRaw = requireNumber(t, "graph", "n");
    if (nRaw < 1 || nRaw != std::floor(nRaw))
        throw ConfigError("[graph] n must be a positive integer");
    const auto n = static_cast<std::size_t>(nRaw);

    const Value& edgesV = require(t, "graph", "edges");
    if (edgesV.type != Value::Type::Array)
        throw ConfigError(edgesV.line, "[graph] edges must be an array of [from, to, weight]");
    std::vector<std::array<double, 3>> edges;
    for (const Value& e : edgesV.items) {
        const std::vector<double> xs = numberList(e, "[graph] edge");
        if (xs.size() != 3)
            throw ConfigError(e.line, "[graph] each edge must be [from, to, weight]");
        edges.push_back({xs[0], xs[1], xs[2]});
    }
    try {
        return CommGraph::fromEdges(n, edges);
    } catch (const std::exception& ex) {
        throw ConfigError(edgesV.line, ex.what());
    }
}

GainSet buildGains(const Table& t) {
    rejectUnknownKeys(t, "gains", {"k_p", "k_v", "k_a", "l_a", "k_gamma", "k_eta", "l_p",
                                   "l_v", "l_q", "k_q", "g"});
    GainSet g;
    g.k_p = requireNumber(t, "gains", "k_p");
    g.k_v = requireNumber(t, "gains", "k_v");
    g.k_a = requireNumber(t, "gains", "k_a");
    g.l_a = requireNumber(t, "gains", "l_a");
    g.k_gamma = requireNumber(t, "gains", "k_gamma");
    g.k_eta = requireNumber(t, "gains", "k_eta");
    g.l_p = requireNumber(t, "gains", "l_p");
    g.l_v = requireNumber(t, "gains", "l_v");
    g.l_q = requireNumber(t, "gains", "l_q");
    g.k_q = requireNumber(t, "gains", "k_q");
    g.g = numberOr(t, "gains", "g", 9.81);
    if (!g.allPositive()) throw ConfigError("[gains] all gains and g must be strictly positive");
    return g;
}

LeaderTrajectory buildLeader(const Table& t) {
    rejectUnknownKeys(t, "leader", {"type", "radius", "omega", "climb_rate", "position",
                                    "velocity", "coeffs_x", "coeffs_y", "coeffs_z"});
    const std::string type = requireString(t, "leader", "type");
    if (type == "helix") {
        return LeaderTrajectory::helix(requireNumber(t, "leader", "radius"),
                                       requireNumber(t, "leader", "omega"),
                                       requireNumber(t, "leader", "climb_rate"));
    }
    if (type == "point") {
        return LeaderTrajectory::point(vec3Or(t, "leader", "position", Vec3{}));
    }
    if (type == "constant_velocity") {
        return LeaderTrajectory::constantVelocity(vec3Or(t, "leader", "position", Vec3{}),
                                                  requireVec3(t, "leader", "velocity"));
    }
    if (type == "polynomial") {
        const auto coeffs = [&](const char* key) {
            return numberList(require(t, "leader", key), std::string("[leader] ") + key);
        };
        return LeaderTrajectory::polynomial(coeffs("coeffs_x"), coeffs("coeffs_y"),
                                            coeffs("coeffs_z"));
    }
    throw ConfigError("[leader] unknown type '" + type +
                      "' (expected helix, point, constant_velocity or polynomial)");
}

SimParams buildSim(const Table& t) {
    rejectUnknownKeys(t, "sim", {"dt", "t_end", "output_period", "sgn_mode", "eps"});
    SimParams s;
    s.dt = requireNumber(t, "sim", "dt");
    s.tEnd = requireNumber(t, "sim", "t_end");
    s.outputPeriod = numberOr(t, "sim", "output_period", 1e-2);
    s.eps = numberOr(t, "sim", "eps", 1e-3);
    if (t.count("sgn_mode")) {
        const std::string mode = requireString(t, "sim", "sgn_mode");
        if (mode == "exact")
            s.sgnMode = SgnMode::Exact;
        else if (mode == "smoothed")
            s.sgnMode = SgnMode::Smoothed;
        else
            throw ConfigError("[sim] sgn_mode must be \"exact\" or \"smoothed\"");
    }
    if (!(s.dt > 0.0)) throw ConfigError("[sim] dt must be > 0");
    if (!(s.tEnd >= 0.0)) throw ConfigError("[sim] t_end must be >= 0");
    if (!(s.outputPeriod >= s.dt)) throw ConfigError("[sim] output_period must be >= dt");
    if (!(s.eps > 0.0)) throw ConfigError("[sim] eps must be > 0");
    return s;
}

VehicleConfig buildVehicle(const Table& t, double g, std::size_t index) {
    const std::string section = "vehicle #" + std::to_string(index + 1);
    rejectUnknownKeys(t, section, {"mass", "inertia", "position", "velocity", "attitude",
                                   "omega", "delta"});
    VehicleConfig v;
    v.params.mass = requireNumber(t, section, "mass");
    if (!(v.params.mass > 0.0)) throw ConfigError("[" + section + "] mass must be > 0");
    const Vec3 inertia = requireVec3(t, section, "inertia");
    if (!(inertia.x > 0.0 && inertia.y > 0.0 && inertia.z > 0.0))
        throw ConfigError("[" + section + "] inertia diagonal entries must be > 0");
    v.params.inertiaDiag = inertia;
    v.params.g = g;
    v.initial.p = requireVec3(t, section, "position");
    v.initial.v = vec3Or(t, section, "velocity", Vec3{});
    v.initial.omega = vec3Or(t, section, "omega", Vec3{});
    v.delta = requireVec3(t, section, "delta");
    if (t.count("attitude")) {
        const std::vector<double> q =
            numberList(require(t, section, "attitude"), "[" + section + "] 'attitude'");
        if (q.size() != 4)
            throw ConfigError("[" + section + "] attitude must be [w, x, y, z]");
        UnitQuaternion Q{q[0], {q[1], q[2], q[3]}};
        if (std::fabs(Q.norm() - 1.0) > 1e-6)
            throw ConfigError("[" + section + "] attitude quaternion must have unit norm");
        v.initial.Q = Q.normalized();
    }
    return v;
}

}  // namespace

ScenarioConfig ScenarioConfig::fromString(const std::string& text) {
    const ParsedFile file = parse(text);
    for (const auto& [name, _] : file.sections)
        if (name != "graph" && name != "gains" && name != "leader" && name != "sim")
            throw ConfigError(file.sectionLines.at(name), "unknown section [" + name + "]");
    for (const auto& [name, _] : file.tableArrays)
        if (name != "vehicle") throw ConfigError("unknown table array [[" + name + "]]");

    const auto section = [&](const char* name) -> const Table& {
        const auto it = file.sections.find(name);
        if (it == file.sections.end())
            throw ConfigError(std::string("missing required section [") + name + "]");
        return it->second;
    };

    ScenarioConfig cfg;
    cfg.graph = buildGraph(section("graph"));
    cfg.gains = buildGains(section("gains"));
    cfg.leader = buildLeader(section("leader"));
    cfg.sim = buildSim(section("sim"));

    const auto vehIt = file.tableArrays.find("vehicle");
    if (vehIt == file.tableArrays.end() || vehIt->second.empty())
        throw ConfigError("at least one [[vehicle]] block is required");
    for (std::size_t i = 0; i < vehIt->second.size(); ++i)
        cfg.vehicles.push_back(buildVehicle(vehIt->second[i], cfg.gains.g, i));

    if (cfg.vehicles.size() != cfg.graph.n)
        throw ConfigError("[graph] n = " + std::to_string(cfg.graph.n) + " but " +
                          std::to_string(cfg.vehicles.size()) + " [[vehicle]] blocks were given");
    return cfg;
}

ScenarioConfig ScenarioConfig::fromFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return fromString(buf.str());
}

ScenarioReport validateScenario(const ScenarioConfig& config) {
    ScenarioReport rep;
    rep.spanningTree = hasDirectedSpanningTree(config.graph);
    if (!rep.spanningTree)
        rep.structuralIssues.push_back(
            "Assumption 2 violated: the leader-follower graph has no directed spanning tree "
            "rooted at the leader");
    if (!config.gains.allPositive())
        rep.structuralIssues.push_back("gains must be strictly positive");
    if (!rep.spanningTree) return rep;

    const GraphCertificate cert = buildCertificate(config.graph);
    const double horizon = config.sim.tEnd > 0.0 ? config.sim.tEnd : 100.0;
    rep.gainReport = validateGains(config.gains, cert,
                                   config.leader.nPBar(config.gains.l_a, horizon),
                                   config.leader.accelBoundInf(horizon),
                                   config.leader.accelBound2(horizon));
    return rep;
}

std::string formatReport(const ScenarioReport& report) {
    std::ostringstream out;
    out << "spanning tree rooted at leader: " << (report.spanningTree ? "yes" : "NO") << "\n";
    for (const std::string& issue : report.structuralIssues) out << "structural: " << issue << "\n";
    if (!report.spanningTree) return out.str();
    out << "leader bounds: sup|a|_inf=" << report.gainReport.accelBoundInf
        << " sup||a||=" << report.gainReport.accelBound2
        << " N_p_bar=" << report.gainReport.nPBar << "\n";
    for (const auto& c : report.gainReport.conditions) {
        out << (c.pass ? "[pass] " : "[FAIL] ") << c.name;
        if (c.evaluable)
            out << "  margin=" << c.margin << "  (" << c.detail << ")";
        else
            out << "  (" << c.detail << ")";
        out << "\n";
    }
    return out.str();
}

}  // namespace vtolsim
