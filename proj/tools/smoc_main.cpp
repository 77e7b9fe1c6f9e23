// smoc: multipath routing scenarios from the command line.
//
//   smoc run <topology> <scenario> [--out FILE] [--csv] [--quiet]
//   smoc run <scenario-with-topology-line> [...]
//   smoc paths <topology> <src-switch> <dst-switch>
//   smoc decode <hex-frame>
//
// Exit codes: 0 success, 2 input/parse error, 3 simulation error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "smoc/errors.hpp"
#include "smoc/fabric.hpp"
#include "smoc/netgraph.hpp"
#include "smoc/scenario.hpp"
#include "smoc/wire.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSim = 3;

smoc::net::Topology load_topology(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw smoc::ConfigError("cannot open topology file: " + path);
    try {
        return smoc::net::parse_topology(in);
    } catch (const smoc::ParseError& e) {
        throw smoc::ParseError(e.line, path + ": " + e.detail);
    }
}

smoc::scn::Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw smoc::ConfigError("cannot open scenario file: " + path);
    try {
        return smoc::scn::parse_scenario(in);
    } catch (const smoc::ParseError& e) {
        throw smoc::ParseError(e.line, path + ": " + e.detail);
    }
}

struct RunArgs {
    std::string file_a;
    std::string file_b;  // empty when the scenario file names its topology
    std::string out_path;
    bool csv = false;
    bool quiet = false;
};

int cmd_run(const RunArgs& args) {
    std::string scenario_path = args.file_b.empty() ? args.file_a : args.file_b;
    smoc::scn::Scenario scenario = load_scenario(scenario_path);

    std::string topo_path;
    if (!args.file_b.empty()) {
        topo_path = args.file_a;
    } else if (!scenario.topology.empty()) {
        // A lone scenario argument relies on its own topology line,
        // resolved relative to the scenario file.
        topo_path =
            (std::filesystem::path(scenario_path).parent_path() / scenario.topology).string();
    } else {
        throw smoc::ConfigError("no topology: pass one or add a topology line to " +
                                scenario_path);
    }
    smoc::net::Topology topo = load_topology(topo_path);

    smoc::sim::RunResult result = smoc::scn::run_scenario(topo, scenario);

    if (!args.quiet) {
        for (const auto& line : result.audit) std::cout << line << '\n';
    }
    const std::string report = args.csv ? smoc::scn::format_csv(result.series)
                                        : smoc::scn::format_summary(scenario, result.series);
    if (args.out_path.empty()) {
        std::cout << report;
    } else {
        std::ofstream out(args.out_path);
        if (!out) throw smoc::ConfigError("cannot write: " + args.out_path);
        out << report;
    }
    return kExitOk;
}

int cmd_paths(const std::string& topo_path, const std::string& src, const std::string& dst) {
    smoc::net::Topology topo = load_topology(topo_path);
    smoc::net::PathSet set = smoc::net::compute_path_set(topo, src, dst);
    const smoc::net::Path& primary = set.paths().front();
    std::cout << "format=1\n";
    std::cout << "pathset src=" << src << " dst=" << dst << " n=" << set.size() << '\n';
    for (std::size_t i = 0; i < set.paths().size(); ++i) {
        const smoc::net::Path& p = set.paths()[i];
        std::cout << "path " << i << " hops=" << smoc::net::hop_len(p)
                  << " shared=" << smoc::net::shared_edges(p, primary)
                  << " route=" << smoc::net::format_path(p) << '\n';
    }
    return kExitOk;
}

int cmd_decode(const std::string& hex) {
    auto bytes = smoc::wire::parse_hex(hex);
    if (!bytes) {
        std::cerr << "error: not a hex string (even-length hex digits required)\n";
        return kExitInput;
    }
    smoc::wire::DecodeResult result = smoc::wire::decode_packet(*bytes);
    if (const auto* err = std::get_if<smoc::wire::DecodeError>(&result)) {
        std::cout << "error=" << smoc::wire::to_string(err->code) << " msg=" << err->message
                  << '\n';
        return kExitOk;
    }
    const auto& p = std::get<smoc::wire::Packet>(result);
    std::cout << "class=" << smoc::wire::to_string(smoc::wire::classify(p));
    std::cout << " src=" << smoc::wire::format_ipv4(p.endpoints.src_ip) << ':'
              << p.endpoints.src_port;
    std::cout << " dst=" << smoc::wire::format_ipv4(p.endpoints.dst_ip) << ':'
              << p.endpoints.dst_port;
    std::cout << " flags=" << smoc::wire::format_flags(p.tcp_flags);
    std::cout << " payload_len=" << p.payload_len;
    if (p.mptcp) {
        char key[2 + 16 + 1];
        if (const auto* cap = std::get_if<smoc::wire::MpCapable>(&*p.mptcp)) {
            std::snprintf(key, sizeof key, "0x%016llx",
                          static_cast<unsigned long long>(cap->key));
            std::cout << " option=mp_capable key=" << key;
        } else {
            const auto& join = std::get<smoc::wire::MpJoin>(*p.mptcp);
            std::snprintf(key, sizeof key, "0x%016llx",
                          static_cast<unsigned long long>(join.peer_key));
            std::cout << " option=mp_join peer_key=" << key;
        }
    } else {
        std::cout << " option=none";
    }
    for (const auto& note : smoc::wire::lint_packet(p)) std::cout << " lint=" << note;
    std::cout << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multipath routing controller scenarios"};
    app.require_subcommand(1);

    RunArgs run_args;
    std::vector<std::string> run_files;
    CLI::App* run = app.add_subcommand("run", "simulate a scenario and report throughput");
    run->add_option("files", run_files,
                    "topology file and scenario file (or one scenario file with a topology line)")
        ->expected(1, 2)
        ->check(CLI::ExistingFile);
    run->add_option("--out", run_args.out_path, "write the report to a file");
    run->add_flag("--csv", run_args.csv, "report the per-step CSV instead of the summary");
    run->add_flag("--quiet", run_args.quiet, "suppress controller audit lines");

    std::string paths_topo, paths_src, paths_dst;
    CLI::App* paths = app.add_subcommand("paths", "list the path set between two switches");
    paths->add_option("topology", paths_topo, "topology file")
        ->required()
        ->check(CLI::ExistingFile);
    paths->add_option("src", paths_src, "source switch id")->required();
    paths->add_option("dst", paths_dst, "destination switch id")->required();

    std::string decode_hex;
    CLI::App* decode = app.add_subcommand("decode", "decode a hex-encoded frame");
    decode->add_option("hex", decode_hex, "frame bytes as hex")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInput;
    }

    try {
        if (run->parsed()) {
            run_args.file_a = run_files.at(0);
            if (run_files.size() > 1) run_args.file_b = run_files.at(1);
            return cmd_run(run_args);
        }
        if (paths->parsed()) return cmd_paths(paths_topo, paths_src, paths_dst);
        if (decode->parsed()) return cmd_decode(decode_hex);
    } catch (const smoc::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const smoc::UnknownSwitchError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const smoc::UnknownHostError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const smoc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSim;
    }
    return kExitInput;
}
