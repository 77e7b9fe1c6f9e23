#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "smoc/netgraph.hpp"
#include "smoc/wire.hpp"

// Decision engine: table-driven handling of packet-in events, path
// assignment per subflow, flow-rule emission, plus the two baseline
// controllers used as experimental controls.
//
// Single-threaded event-loop contract: handle_packet_in mutates session
// tables and path-set cursors; process events in arrival order from one
// thread. A controller may be moved between threads but never shared
// mutably.
namespace smoc::ctrl {

struct PacketInEvent {
    net::SwitchId sw;  // switch where the table miss occurred
    int in_port = 0;
    wire::Packet packet;
};

// Exact 5-tuple match (protocol TCP implied) -> output port.
struct FlowRule {
    net::SwitchId sw;
    wire::EndpointPair match;
    int out_port = 0;
    auto operator<=>(const FlowRule&) const = default;
};

struct Decision {
    net::Path route;
    std::vector<FlowRule> rules;
    std::vector<std::string> table_delta;  // canonical mutation records
    std::string note;                      // anomaly marker, empty when clean
};

// One rule per switch on the route forwarding toward the next hop; the
// final switch forwards to the destination host's port. Rules match the
// exact 5-tuple only. Throws HostNotOnPathError on a mismatched endpoint
// attachment.
std::vector<FlowRule> install_path(const net::Topology& topo, const net::Path& route,
                                   const wire::EndpointPair& match,
                                   const net::HostId& src_host,
                                   const net::HostId& dst_host);

// One structured line per Decision, for golden-trace diffing:
//   event=<class> src=<ip:port> dst=<ip:port> route=<a-b-c> rules=<n>
//   delta=<m1;m2;...|-> note=<text|->
std::string format_audit_line(wire::PacketClass cls, const wire::EndpointPair& ep,
                              const Decision& d);

// The three session tables. Path sets are shared handles: the cursor
// advanced while a set sits in a pending table stays advanced after the
// set moves into mptcp_connections.
struct SessionTables {
    struct PendingCapable {
        std::uint64_t initiator_key = 0;
        std::shared_ptr<net::PathSet> forward;  // initiator -> listener
        net::Path assigned_route;               // reissued on SYN retransmit
        double created_at = 0;
    };
    struct PendingJoin {
        std::uint64_t session_key = 0;    // connection entry holding the reply set
        std::uint64_t presented_key = 0;  // key carried by the MP_JOIN SYN
        std::shared_ptr<net::PathSet> forward;
        net::Path assigned_route;
        double created_at = 0;
    };
    struct Connection {
        std::uint64_t peer_key = 0;
        std::shared_ptr<net::PathSet> toward_owner;  // paths toward the key's owner
        double last_used = 0;
    };

    std::map<wire::EndpointPair, PendingCapable> pending_capable;
    std::map<wire::EndpointPair, PendingJoin> pending_join;
    std::map<std::uint64_t, Connection> mptcp_connections;
};

class Controller {
public:
    virtual ~Controller() = default;

    // Throws UnknownSwitchError / UnknownHostError; recoverable anomalies
    // (unknown session, stray replies) fall back to the shortest path and
    // are marked in Decision::note instead.
    virtual Decision handle_packet_in(const PacketInEvent& ev) = 0;

    virtual std::string_view name() const = 0;

    // Clock for TTL-based eviction; default controllers ignore it.
    virtual void advance_time(double /*now*/) {}
};

struct SmocOptions {
    net::PathSetOptions path_opts;
    // Idle lifetimes in sim seconds; infinite disables eviction.
    double pending_ttl = std::numeric_limits<double>::infinity();
    double connection_ttl = std::numeric_limits<double>::infinity();
};

// MPTCP-aware controller: pairs subflows into sessions via handshake keys
// and cycles each direction's path set across the session's subflows.
class SmocController final : public Controller {
public:
    explicit SmocController(const net::Topology& topo, SmocOptions opts = {});

    Decision handle_packet_in(const PacketInEvent& ev) override;
    std::string_view name() const override { return "smoc"; }
    void advance_time(double now) override;

    const SessionTables& tables() const { return tables_; }

private:
    std::shared_ptr<net::PathSet> path_set_between(const net::SwitchId& s1,
                                                   const net::SwitchId& s2) const;

    const net::Topology& topo_;
    SmocOptions opts_;
    SessionTables tables_;
    double now_ = 0;
};

// Confines every flow to the unique path of the BFS spanning tree; keeps
// no session state.
class SpanningTreeController final : public Controller {
public:
    explicit SpanningTreeController(const net::Topology& topo);
    Decision handle_packet_in(const PacketInEvent& ev) override;
    std::string_view name() const override { return "spanning-tree"; }

private:
    const net::Topology& topo_;
    net::Topology tree_;
};

// Always routes along the shortest path; stateless.
class ShortestPathController final : public Controller {
public:
    explicit ShortestPathController(const net::Topology& topo);
    Decision handle_packet_in(const PacketInEvent& ev) override;
    std::string_view name() const override { return "shortest-path"; }

private:
    const net::Topology& topo_;
};

}  // namespace smoc::ctrl
