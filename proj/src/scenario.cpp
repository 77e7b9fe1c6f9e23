#include "smoc/scenario.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>

#include "smoc/errors.hpp"

namespace smoc::scn {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

double parse_number(const std::string& tok, int line) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError(line, "bad number: " + tok);
    }
    return value;
}

std::uint64_t parse_seed(const std::string& tok, int line) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError(line, "bad seed: " + tok);
    }
    return value;
}

int parse_count(const std::string& tok, int line) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError(line, "bad count: " + tok);
    }
    return value;
}

ControllerKind parse_controller(const std::string& tok, int line) {
    if (tok == "smoc") return ControllerKind::Smoc;
    if (tok == "stp") return ControllerKind::SpanningTree;
    if (tok == "spf") return ControllerKind::ShortestPath;
    throw ParseError(line, "controller must be smoc, stp, or spf: " + tok);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
    Scenario scenario;
    std::string line;
    int lineno = 0;
    bool saw_format = false;

    while (std::getline(in, line)) {
        ++lineno;
        const auto tokens = tokenize(strip_comment(line));
        if (tokens.empty()) continue;

        if (!saw_format) {
            if (tokens.size() != 1 || tokens[0] != "format=1") {
                throw ParseError(lineno, "expected format=1 header");
            }
            saw_format = true;
            continue;
        }

        if (tokens[0] == "topology" && tokens.size() == 2) {
            scenario.topology = tokens[1];
        } else if (tokens[0] == "controller" && tokens.size() == 2) {
            scenario.controller = parse_controller(tokens[1], lineno);
        } else if (tokens[0] == "step" && tokens.size() == 2) {
            scenario.config.step = parse_number(tokens[1], lineno);
        } else if (tokens[0] == "duration" && tokens.size() == 2) {
            scenario.config.duration = parse_number(tokens[1], lineno);
        } else if (tokens[0] == "install_delay" && tokens.size() == 2) {
            scenario.config.install_delay = parse_number(tokens[1], lineno);
        } else if (tokens[0] == "seed" && tokens.size() == 2) {
            scenario.config.seed = parse_seed(tokens[1], lineno);
        } else if (tokens[0] == "session" && tokens.size() == 6) {
            sim::Session s;
            s.id = tokens[1];
            s.initiator = tokens[2];
            s.listener = tokens[3];
            s.subflows = parse_count(tokens[4], lineno);
            s.start_time = parse_number(tokens[5], lineno);
            scenario.sessions.push_back(std::move(s));
        } else {
            throw ParseError(lineno, "unrecognized directive: " + tokens[0]);
        }
    }
    if (!saw_format) throw ParseError(lineno == 0 ? 1 : lineno, "missing format=1 header");
    if (scenario.sessions.empty()) throw ParseError(lineno == 0 ? 1 : lineno, "no sessions");
    return scenario;
}

std::unique_ptr<ctrl::Controller> make_controller(ControllerKind kind,
                                                  const net::Topology& topo) {
    switch (kind) {
        case ControllerKind::Smoc: return std::make_unique<ctrl::SmocController>(topo);
        case ControllerKind::SpanningTree:
            return std::make_unique<ctrl::SpanningTreeController>(topo);
        case ControllerKind::ShortestPath:
            return std::make_unique<ctrl::ShortestPathController>(topo);
    }
    throw ConfigError("unknown controller kind");
}

sim::RunResult run_scenario(const net::Topology& topo, const Scenario& scenario) {
    auto controller = make_controller(scenario.controller, topo);
    return sim::run(topo, scenario.sessions, *controller, scenario.config);
}

std::string format_csv(const sim::ThroughputSeries& series) {
    std::string out = "format=1\n";
    out += "time";
    for (const auto& id : series.session_ids) out += ",session:" + id;
    for (const auto& name : series.link_names) out += ",link:" + name;
    out += '\n';
    for (const auto& row : series.rows) {
        out += fmt(row.time);
        for (double r : row.session_rates) out += "," + fmt(r);
        for (double u : row.link_util) out += "," + fmt(u);
        out += '\n';
    }
    return out;
}

std::string format_summary(const Scenario& scenario, const sim::ThroughputSeries& series) {
    const sim::Summary summary = sim::summarize(series);
    const char* controller = "";
    switch (scenario.controller) {
        case ControllerKind::Smoc: controller = "smoc"; break;
        case ControllerKind::SpanningTree: controller = "spanning-tree"; break;
        case ControllerKind::ShortestPath: controller = "shortest-path"; break;
    }
    std::string out = "format=1\n";
    out += "controller=";
    out += controller;
    out += " step=" + fmt(scenario.config.step);
    out += " duration=" + fmt(scenario.config.duration);
    out += " install_delay=" + fmt(scenario.config.install_delay);
    out += " seed=" + std::to_string(scenario.config.seed);
    out += " steps=" + std::to_string(series.rows.size());
    out += '\n';
    for (const auto& s : summary.sessions) {
        out += "session=" + s.id + " steady=" + fmt(s.steady) +
               " time_to_steady=" + fmt(s.time_to_steady) + '\n';
    }
    out += "aggregate_steady=" + fmt(summary.aggregate_steady) + '\n';
    return out;
}

}  // namespace smoc::scn
