#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "smoc/wire.hpp"

// Topology representation, shortest/simple path enumeration, path-set
// computation with cyclic iteration, and the spanning-tree sub-topology
// used by the baseline controller.
namespace smoc::net {

using SwitchId = std::string;
using HostId = std::string;

// Simple switch sequence: no repeated switch, consecutive switches linked.
using Path = std::vector<SwitchId>;

inline int hop_len(const Path& p) { return static_cast<int>(p.size()) - 1; }

std::string format_path(const Path& p);  // "a-b-c"

// What sits behind a switch port.
struct PortPeer {
    enum class Kind { Switch, Host };
    Kind kind;
    std::string id;
};

// Immutable undirected graph of switches with capacity-labeled links and
// host attachment points. Construct through Builder, which enforces the
// invariants (connected, no self-loops, one link per pair, hosts on
// existing switches, unique host ips).
//
// Port numbering per switch is deterministic: ports 1..k go to the sorted
// neighbor switches, ports k+1.. to the attached hosts sorted by id.
class Topology {
public:
    struct Host {
        SwitchId attached;
        wire::Ipv4 ip = 0;
    };

    using LinkKey = std::pair<SwitchId, SwitchId>;  // normalized: first < second

    class Builder {
    public:
        // Switches must be declared before links/hosts that reference them.
        Builder& add_switch(const SwitchId& id);
        Builder& add_link(const SwitchId& a, const SwitchId& b, double capacity);
        Builder& add_host(const HostId& id, const SwitchId& sw, wire::Ipv4 ip);
        Topology build() const;  // throws TopologyError when disconnected

    private:
        std::set<SwitchId> switches_;
        std::map<LinkKey, double> links_;
        std::map<HostId, Host> hosts_;
        std::map<wire::Ipv4, HostId> by_ip_;
    };

    Topology() = default;

    const std::set<SwitchId>& switches() const { return switches_; }
    bool has_switch(const SwitchId& id) const { return switches_.count(id) > 0; }

    // Sorted neighbor -> link capacity. Throws UnknownSwitchError.
    const std::map<SwitchId, double>& neighbors(const SwitchId& id) const;

    const std::map<LinkKey, double>& links() const { return links_; }
    std::optional<double> link_capacity(const SwitchId& a, const SwitchId& b) const;

    const std::map<HostId, Host>& hosts() const { return hosts_; }
    const Host& host(const HostId& id) const;  // throws UnknownHostError
    std::optional<HostId> host_by_ip(wire::Ipv4 ip) const;

    int port_to_switch(const SwitchId& sw, const SwitchId& peer) const;
    int port_to_host(const SwitchId& sw, const HostId& host) const;
    const PortPeer& port_peer(const SwitchId& sw, int port) const;
    const std::vector<PortPeer>& ports(const SwitchId& sw) const;

    static LinkKey link_key(const SwitchId& a, const SwitchId& b);

private:
    std::set<SwitchId> switches_;
    std::map<SwitchId, std::map<SwitchId, double>> adj_;
    std::map<LinkKey, double> links_;
    std::map<HostId, Host> hosts_;
    std::map<wire::Ipv4, HostId> by_ip_;
    std::map<SwitchId, std::vector<PortPeer>> ports_;
    std::map<SwitchId, std::map<SwitchId, int>> switch_port_;
    std::map<SwitchId, std::map<HostId, int>> host_port_;
};

// Minimum-hop path; ties broken by lexicographically smallest switch-id
// sequence. s1 == s2 yields the one-node path. Throws UnknownSwitchError,
// NoPathError.
Path shortest_path(const Topology& g, const SwitchId& s1, const SwitchId& s2);

// Every simple path with hop count <= max_hops, in lexicographic order of
// the switch sequence. Requires s1 != s2.
std::vector<Path> all_simple_paths(const Topology& g, const SwitchId& s1,
                                   const SwitchId& s2, int max_hops);

// Number of undirected edges appearing in both paths; symmetric.
int shared_edges(const Path& p, const Path& q);

struct PathSetOptions {
    int max_hops = 16;   // simple-path enumeration bound
    int max_paths = 64;  // total paths kept per set; sorted tail truncated
};

// Ordered cyclic sequence of paths between two switches; the primary path
// first, then alternates. next() hands out paths round-robin. Carries a
// mutable cursor: confine to one event loop, do not share across threads.
class PathSet {
public:
    PathSet() = default;
    explicit PathSet(std::vector<Path> paths);  // requires non-empty

    // Returns paths[cursor], then advances cursor modulo size.
    const Path& next();

    const std::vector<Path>& paths() const { return paths_; }
    std::size_t size() const { return paths_.size(); }
    std::size_t cursor() const { return cursor_; }

private:
    std::vector<Path> paths_;
    std::size_t cursor_ = 0;
};

// Primary path = shortest_path(g, s1, s2); alternates = all other simple
// paths sorted by (edges shared with the primary ascending, hop length
// ascending, lexicographic sequence ascending).
PathSet compute_path_set(const Topology& g, const SwitchId& s1, const SwitchId& s2,
                         const PathSetOptions& opts = {});

// Breadth-first tree rooted at the lexicographically smallest switch id,
// neighbors visited in id order. Same switches and hosts, |switches|-1
// links, link capacities preserved.
Topology spanning_tree(const Topology& g);

// Line-oriented topology file:
//   format=1
//   switch <id>
//   link <id1> <id2> <capacity>
//   host <id> <switch> <ip>
// with '#' comments. Throws ParseError (line-numbered) or TopologyError.
Topology parse_topology(std::istream& in);

}  // namespace smoc::net
