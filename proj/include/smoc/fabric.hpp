#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smoc/controller.hpp"
#include "smoc/netgraph.hpp"
#include "smoc/wire.hpp"

// Deterministic discrete-time fluid simulator: hosts emit MPTCP handshakes,
// switches raise packet-in events on table misses, controller decisions
// install flow rules after a configurable delay, and per-step rates come
// from max-min fair sharing. Single-threaded; two runs with identical
// inputs produce identical output.
namespace smoc::sim {

// Forwarding state of one switch. The table holds only rules that are
// already active; rules still waiting out install_delay live in the
// simulator's pending queue, so a lookup needs no clock.
struct SwitchState {
    net::SwitchId id;
    std::map<wire::EndpointPair, ctrl::FlowRule> table;  // one rule per 5-tuple
    std::vector<net::PortPeer> ports;                    // ports[i] is port i+1
};

// Exact-match lookup: output port on a hit, nullopt on a table miss.
// Rules are directional, so a reverse-direction packet misses even when
// the forward rule is installed.
std::optional<int> deliver(const SwitchState& sw, const wire::Packet& p);

enum class SubflowState { Handshaking, Established, Blocked };

// One TCP-like flow within a session, identified by its own 5-tuple.
struct Subflow {
    std::string session_id;
    int index = 0;
    wire::EndpointPair tuple;          // data direction: initiator -> listener
    std::optional<net::Path> route;    // assigned data route, once decided
    SubflowState state = SubflowState::Handshaking;
};

struct Session {
    std::string id;
    net::HostId initiator;
    net::HostId listener;
    // 64-bit handshake keys. Leave both zero to have run() derive them
    // from SimConfig::seed.
    std::uint64_t initiator_key = 0;
    std::uint64_t listener_key = 0;
    int subflows = 1;        // >= 1
    double start_time = 0;   // sim seconds
};

struct SimConfig {
    double step = 0.5;          // sim seconds per step, > 0
    double duration = 10.0;     // total simulated time, covers all start times
    double install_delay = 0;   // seconds until a Decision's rules activate
    std::uint64_t seed = 1;     // key material for sessions without keys
};

// Per-step record: time, aggregate rate per session, utilization per link.
// Column order matches session_ids / link_names (both sorted).
struct ThroughputSeries {
    std::vector<std::string> session_ids;
    std::vector<std::string> link_names;  // "u-v" with u < v
    struct Row {
        double time = 0;
        std::vector<double> session_rates;
        std::vector<double> link_util;
    };
    std::vector<Row> rows;
};

struct RunResult {
    ThroughputSeries series;
    std::vector<Subflow> subflows;    // final states, session then index order
    std::vector<std::string> audit;   // controller decisions and errors, in order
};

struct SessionSummary {
    std::string id;
    double steady = 0;          // aggregate rate of the final step
    double time_to_steady = 0;  // earliest time from which the rate never leaves steady
};

struct Summary {
    std::vector<SessionSummary> sessions;
    double aggregate_steady = 0;
};

// Classical progressive filling: all unfrozen flows grow at one common
// rate; when a link saturates, the flows crossing it freeze. Result: no
// flow can gain rate without costing a flow of equal or smaller rate, and
// per-link sums never exceed capacity. A route with no links (both hosts
// on one switch) has no constraining capacity in the fluid model and is
// pinned to rate 0. Flow ids must be unique; paths must follow existing
// links.
std::map<std::string, double> maxmin_allocate(
    const std::vector<std::pair<std::string, net::Path>>& flows,
    const net::Topology& topo);

// Fills in zero key pairs deterministically from seed, in sorted session-id
// order: nonzero and globally distinct across all sessions.
void assign_session_keys(std::vector<Session>& sessions, std::uint64_t seed);

// Simulation loop. Each step, in order: activate pending rules; sessions
// whose start time has arrived emit handshake packets (sessions in id
// order, subflows in index order; SYN then SYN/ACK per subflow); a table
// miss raises a packet-in, the controller's rules are queued to activate
// at now + install_delay, and the triggering handshake packet is forwarded
// by the controller itself. A subflow is established once both directions'
// rules are active; established subflows split bandwidth max-min fairly.
//
// The handshake is modeled as SYN plus SYN/ACK; the closing ACK follows
// the installed rules and is absorbed into the established transition.
// Handshake packets consume no bandwidth. Controller exceptions are
// logged and leave the subflow blocked. Throws ConfigError on invalid
// config or sessions.
RunResult run(const net::Topology& topo, std::vector<Session> sessions,
              ctrl::Controller& controller, const SimConfig& cfg);

// Steady state = final-step rate; time-to-steady = earliest time from
// which the session's rate stays within 1e-9 of it.
Summary summarize(const ThroughputSeries& series);

}  // namespace smoc::sim
