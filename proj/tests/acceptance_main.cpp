// Acceptance gate: end-to-end checks of the shipped behavior, one PASS or
// FAIL line each. Exits nonzero when anything fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "smoc/controller.hpp"
#include "smoc/errors.hpp"
#include "smoc/fabric.hpp"
#include "smoc/netgraph.hpp"
#include "smoc/scenario.hpp"
#include "smoc/wire.hpp"
#include "support/oracle.hpp"

namespace {

// Pinned tolerances and workloads.
constexpr double kTopo1Target = 400.0;
constexpr double kTopo1Tolerance = 4.0;  // 1% of 400
constexpr double kTopo2Target = 200.0;
constexpr double kTopo2Tolerance = 2.0;  // 1% of 200
constexpr double kBaselineTarget = 100.0;
constexpr double kBaselineTolerance = 1e-9;  // exact in the fluid model
constexpr double kMaxSeconds = 5.0;
constexpr int kDelaySteps = 4;  // ceil(2.0 / 0.5)
constexpr int kGraphTrials = 250;
constexpr int kRoundTrips = 10000;

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    if (!ok) ++failures;
}

smoc::net::Topology load_topology(const char* path) {
    std::ifstream in(path);
    if (!in) throw smoc::ConfigError(std::string("missing fixture: ") + path);
    return smoc::net::parse_topology(in);
}

smoc::sim::Session four_subflows(double start = 0) {
    smoc::sim::Session s;
    s.id = "s1";
    s.initiator = "h1";
    s.listener = "h2";
    s.subflows = 4;
    s.start_time = start;
    return s;
}

smoc::sim::SimConfig base_config() {
    smoc::sim::SimConfig cfg;
    cfg.step = 0.5;
    cfg.duration = 10.0;
    cfg.install_delay = 0;
    cfg.seed = 1;
    return cfg;
}

double aggregate_steady(const smoc::sim::RunResult& r) {
    double total = 0;
    for (double v : r.series.rows.back().session_rates) total += v;
    return total;
}

std::string fmt(const char* pattern, double a, double b = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

void check_fixture_throughput() {
    using clock = std::chrono::steady_clock;

    {
        smoc::net::Topology topo = load_topology("fixtures/topo1.txt");
        smoc::ctrl::SmocController controller(topo);
        const auto t0 = clock::now();
        smoc::sim::RunResult r = smoc::sim::run(topo, {four_subflows()}, controller,
                                                base_config());
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        const double agg = aggregate_steady(r);
        report("disjoint-paths-aggregate",
               std::abs(agg - kTopo1Target) <= kTopo1Tolerance && secs < kMaxSeconds,
               fmt("steady aggregate %.6f (target 400 +/- 4), %.3f s", agg, secs));
    }
    {
        smoc::net::Topology topo = load_topology("fixtures/topo2.txt");
        smoc::ctrl::SmocController controller(topo);
        smoc::sim::RunResult r = smoc::sim::run(topo, {four_subflows()}, controller,
                                                base_config());
        const double agg = aggregate_steady(r);
        report("shared-middle-aggregate", std::abs(agg - kTopo2Target) <= kTopo2Tolerance,
               fmt("steady aggregate %.6f (target 200 +/- 2)", agg));
    }
    {
        bool ok = true;
        std::string detail;
        for (const char* path : {"fixtures/topo1.txt", "fixtures/topo2.txt"}) {
            smoc::net::Topology topo = load_topology(path);
            smoc::ctrl::SpanningTreeController controller(topo);
            smoc::sim::RunResult r = smoc::sim::run(topo, {four_subflows()}, controller,
                                                    base_config());
            const double agg = aggregate_steady(r);
            ok = ok && std::abs(agg - kBaselineTarget) <= kBaselineTolerance;
            if (!detail.empty()) detail += ", ";
            detail += fmt("%.9f", agg);
        }
        report("spanning-tree-baseline", ok,
               "steady aggregates " + detail + " (target exactly 100)");
    }
}

void check_install_delay_onset() {
    smoc::net::Topology topo = load_topology("fixtures/topo1.txt");
    smoc::sim::SimConfig cfg = base_config();
    cfg.install_delay = 2.0;
    smoc::ctrl::SmocController controller(topo);
    smoc::sim::RunResult r = smoc::sim::run(topo, {four_subflows(1.0)}, controller, cfg);

    std::size_t start_row = 0;
    while (start_row < r.series.rows.size() && r.series.rows[start_row].time < 1.0) {
        ++start_row;
    }
    std::size_t rise = 0;
    while (rise < r.series.rows.size() && r.series.rows[rise].session_rates[0] == 0.0) {
        ++rise;
    }
    const bool ok = rise < r.series.rows.size() &&
                    rise == start_row + kDelaySteps &&
                    r.series.rows[rise].session_rates[0] > 0;
    report("install-delay-onset", ok,
           fmt("throughput rises at row %.0f, session starts at row %.0f (must differ by 4)",
               static_cast<double>(rise), static_cast<double>(start_row)));
}

void check_path_set_against_oracle() {
    std::mt19937 rng(0x5eed);
    smoc::net::PathSetOptions opts;
    int compared = 0;
    int mismatches = 0;
    while (compared < kGraphTrials) {
        smoc::net::Topology topo = oracle::random_topology(rng, 8, false);
        std::vector<smoc::net::SwitchId> ids(topo.switches().begin(), topo.switches().end());
        const auto& s = ids[rng() % ids.size()];
        const auto& t = ids[rng() % ids.size()];
        if (s == t) continue;
        ++compared;
        smoc::net::PathSet got = smoc::net::compute_path_set(topo, s, t, opts);
        std::vector<smoc::net::Path> want =
            oracle::expected_path_set(topo, s, t, opts.max_hops, opts.max_paths);
        if (got.paths() != want) ++mismatches;
    }
    report("path-set-oracle", mismatches == 0,
           fmt("%.0f random graphs compared, %.0f mismatches", compared, mismatches));
}

// Replays the handshake event sequence straight into the controller and
// returns the audit lines.
std::vector<std::string> replay_handshakes(const smoc::net::Topology& topo) {
    using namespace smoc;
    constexpr std::uint64_t kKeyA = 0x1111111111111111ull;
    constexpr std::uint64_t kKeyB = 0x2222222222222222ull;
    ctrl::SmocController controller(topo);
    std::vector<std::string> audit;

    auto feed = [&](const net::SwitchId& sw, const wire::Packet& p) {
        ctrl::Decision d = controller.handle_packet_in({sw, 1, p});
        audit.push_back(ctrl::format_audit_line(wire::classify(p), p.endpoints, d));
    };
    auto forward = [](std::uint16_t port) {
        return wire::EndpointPair{0x0a000001u, port, 0x0a000002u, 5001};
    };

    feed("a", {forward(40000), wire::kSyn, wire::MpCapable{kKeyA}, 0});
    feed("b", {forward(40000).reversed(), wire::kSyn | wire::kAck, wire::MpCapable{kKeyB}, 0});
    for (std::uint16_t port : {40001, 40002, 40003, 40004}) {
        feed("a", {forward(port), wire::kSyn, wire::MpJoin{kKeyB}, 0});
        feed("b", {forward(port).reversed(), wire::kSyn | wire::kAck, wire::MpJoin{kKeyA}, 0});
    }

    const auto& tables = controller.tables();
    if (!tables.pending_capable.empty() || !tables.pending_join.empty() ||
        tables.mptcp_connections.size() != 2 ||
        tables.mptcp_connections.at(kKeyA).peer_key != kKeyB ||
        tables.mptcp_connections.at(kKeyB).peer_key != kKeyA) {
        audit.push_back("table state mismatch");
    }
    return audit;
}

void check_golden_traces() {
    // Five subflows: the four-path cycle hands out indices 0,1,2,3 and the
    // fifth subflow wraps to index 0 in both directions.
    const std::vector<std::string> expected = {
        "event=MpCapableSyn src=10.0.0.1:40000 dst=10.0.0.2:5001 route=a-c-b rules=3 "
        "delta=pending_capable+=10.0.0.1:40000->10.0.0.2:5001 note=-",
        "event=MpCapableSynAck src=10.0.0.2:5001 dst=10.0.0.1:40000 route=b-c-a rules=3 "
        "delta=mptcp_connections+=0x1111111111111111;"
        "mptcp_connections+=0x2222222222222222;"
        "pending_capable-=10.0.0.1:40000->10.0.0.2:5001 note=-",
        "event=MpJoinSyn src=10.0.0.1:40001 dst=10.0.0.2:5001 route=a-d-b rules=3 "
        "delta=pending_join+=10.0.0.1:40001->10.0.0.2:5001 note=-",
        "event=MpJoinSynAck src=10.0.0.2:5001 dst=10.0.0.1:40001 route=b-d-a rules=3 "
        "delta=pending_join-=10.0.0.1:40001->10.0.0.2:5001 note=-",
        "event=MpJoinSyn src=10.0.0.1:40002 dst=10.0.0.2:5001 route=a-e-b rules=3 "
        "delta=pending_join+=10.0.0.1:40002->10.0.0.2:5001 note=-",
        "event=MpJoinSynAck src=10.0.0.2:5001 dst=10.0.0.1:40002 route=b-e-a rules=3 "
        "delta=pending_join-=10.0.0.1:40002->10.0.0.2:5001 note=-",
        "event=MpJoinSyn src=10.0.0.1:40003 dst=10.0.0.2:5001 route=a-f-b rules=3 "
        "delta=pending_join+=10.0.0.1:40003->10.0.0.2:5001 note=-",
        "event=MpJoinSynAck src=10.0.0.2:5001 dst=10.0.0.1:40003 route=b-f-a rules=3 "
        "delta=pending_join-=10.0.0.1:40003->10.0.0.2:5001 note=-",
        "event=MpJoinSyn src=10.0.0.1:40004 dst=10.0.0.2:5001 route=a-c-b rules=3 "
        "delta=pending_join+=10.0.0.1:40004->10.0.0.2:5001 note=-",
        "event=MpJoinSynAck src=10.0.0.2:5001 dst=10.0.0.1:40004 route=b-c-a rules=3 "
        "delta=pending_join-=10.0.0.1:40004->10.0.0.2:5001 note=-",
    };
    smoc::net::Topology topo = load_topology("fixtures/topo1.txt");
    const std::vector<std::string> first = replay_handshakes(topo);
    const std::vector<std::string> second = replay_handshakes(topo);
    const bool ok = first == expected && second == expected;
    report("handshake-golden-trace", ok,
           ok ? "10 audit lines, cycle 0,1,2,3 then wrap, identical across runs"
              : "audit lines diverge from the frozen trace");
    if (!ok) {
        for (std::size_t i = 0; i < std::max(first.size(), expected.size()); ++i) {
            const std::string& got = i < first.size() ? first[i] : "<missing>";
            const std::string& want = i < expected.size() ? expected[i] : "<missing>";
            if (got != want) {
                std::printf("  line %zu\n    got:  %s\n    want: %s\n", i, got.c_str(),
                            want.c_str());
            }
        }
    }
}

void check_codec() {
    std::mt19937_64 rng(0xf00df00d);
    int bad = 0;
    for (int i = 0; i < kRoundTrips; ++i) {
        const smoc::wire::Packet p = oracle::random_packet(rng);
        smoc::wire::DecodeResult r = smoc::wire::decode_packet(smoc::wire::encode_packet(p));
        const auto* back = std::get_if<smoc::wire::Packet>(&r);
        if (back == nullptr || !(*back == p)) ++bad;
    }

    std::ifstream in("fixtures/frames.txt");
    bool corpus_ok = in.good();
    bool saw[3] = {false, false, false};
    std::string line;
    while (corpus_ok && std::getline(in, line)) {
        if (auto pos = line.find('#'); pos != std::string::npos) line = line.substr(0, pos);
        std::istringstream row(line);
        std::string hex, expect;
        if (!(row >> hex >> expect)) continue;
        if (hex == "format=1") continue;
        if (hex == "-") hex.clear();
        auto bytes = smoc::wire::parse_hex(hex);
        if (!bytes) {
            corpus_ok = false;
            break;
        }
        smoc::wire::DecodeResult r = smoc::wire::decode_packet(*bytes);
        if (expect.rfind("ok:", 0) == 0) {
            const auto* p = std::get_if<smoc::wire::Packet>(&r);
            corpus_ok = p != nullptr &&
                        smoc::wire::to_string(smoc::wire::classify(*p)) == expect.substr(3);
        } else {
            const auto* e = std::get_if<smoc::wire::DecodeError>(&r);
            corpus_ok =
                e != nullptr && smoc::wire::to_string(e->code) == expect.substr(6);
            if (e != nullptr) saw[static_cast<int>(e->code)] = true;
        }
        if (!corpus_ok) break;
    }
    corpus_ok = corpus_ok && saw[0] && saw[1] && saw[2];
    report("codec-suite", bad == 0 && corpus_ok,
           fmt("%.0f round-trips, %.0f failures; corpus covers every decode error",
               static_cast<double>(kRoundTrips), static_cast<double>(bad)));
}

}  // namespace

int main() {
    try {
        check_fixture_throughput();
        check_install_delay_onset();
        check_path_set_against_oracle();
        check_golden_traces();
        check_codec();
    } catch (const std::exception& e) {
        std::printf("FAIL unexpected-exception: %s\n", e.what());
        return 1;
    }
    std::printf("%d of 7 acceptance checks passed\n", 7 - failures);
    return failures == 0 ? 0 : 1;
}
