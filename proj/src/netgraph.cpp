#include "smoc/netgraph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <deque>
#include <istream>
#include <sstream>
#include <tuple>

#include "smoc/errors.hpp"

namespace smoc::net {

std::string format_path(const Path& p) {
    std::string out;
    for (const auto& sw : p) {
        if (!out.empty()) out += '-';
        out += sw;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

Topology::LinkKey Topology::link_key(const SwitchId& a, const SwitchId& b) {
    return a < b ? LinkKey{a, b} : LinkKey{b, a};
}

Topology::Builder& Topology::Builder::add_switch(const SwitchId& id) {
    if (id.empty()) throw TopologyError("empty switch id");
    if (!switches_.insert(id).second) {
        throw TopologyError("duplicate switch: " + id);
    }
    return *this;
}

Topology::Builder& Topology::Builder::add_link(const SwitchId& a, const SwitchId& b,
                                               double capacity) {
    if (!switches_.count(a)) throw TopologyError("link references unknown switch: " + a);
    if (!switches_.count(b)) throw TopologyError("link references unknown switch: " + b);
    if (a == b) throw TopologyError("self-loop on switch: " + a);
    if (!(capacity > 0)) {
        throw TopologyError("link " + a + "-" + b + " needs positive capacity");
    }
    if (!links_.emplace(link_key(a, b), capacity).second) {
        throw TopologyError("duplicate link: " + a + "-" + b);
    }
    return *this;
}

Topology::Builder& Topology::Builder::add_host(const HostId& id, const SwitchId& sw,
                                               wire::Ipv4 ip) {
    if (id.empty()) throw TopologyError("empty host id");
    if (!switches_.count(sw)) {
        throw TopologyError("host " + id + " attaches to unknown switch: " + sw);
    }
    if (by_ip_.count(ip)) {
        throw TopologyError("duplicate host ip: " + wire::format_ipv4(ip));
    }
    if (!hosts_.emplace(id, Host{sw, ip}).second) {
        throw TopologyError("duplicate host: " + id);
    }
    by_ip_.emplace(ip, id);
    return *this;
}

Topology Topology::Builder::build() const {
    if (switches_.empty()) throw TopologyError("topology needs at least one switch");

    Topology t;
    t.switches_ = switches_;
    t.links_ = links_;
    t.hosts_ = hosts_;
    t.by_ip_ = by_ip_;
    for (const auto& sw : switches_) t.adj_[sw];  // ensure every switch has an entry
    for (const auto& [key, cap] : links_) {
        t.adj_[key.first][key.second] = cap;
        t.adj_[key.second][key.first] = cap;
    }

    // Connectivity check.
    std::set<SwitchId> seen{*switches_.begin()};
    std::deque<SwitchId> queue{*switches_.begin()};
    while (!queue.empty()) {
        const SwitchId sw = queue.front();
        queue.pop_front();
        for (const auto& [nb, cap] : t.adj_[sw]) {
            if (seen.insert(nb).second) queue.push_back(nb);
        }
    }
    if (seen.size() != switches_.size()) {
        throw TopologyError("topology is not connected");
    }

    // Deterministic port numbering.
    for (const auto& sw : switches_) {
        auto& ports = t.ports_[sw];
        for (const auto& [nb, cap] : t.adj_[sw]) {
            ports.push_back({PortPeer::Kind::Switch, nb});
            t.switch_port_[sw][nb] = static_cast<int>(ports.size());
        }
        for (const auto& [host_id, host] : hosts_) {
            if (host.attached == sw) {
                ports.push_back({PortPeer::Kind::Host, host_id});
                t.host_port_[sw][host_id] = static_cast<int>(ports.size());
            }
        }
    }
    return t;
}

const std::map<SwitchId, double>& Topology::neighbors(const SwitchId& id) const {
    auto it = adj_.find(id);
    if (it == adj_.end()) throw UnknownSwitchError(id);
    return it->second;
}

std::optional<double> Topology::link_capacity(const SwitchId& a, const SwitchId& b) const {
    auto it = links_.find(link_key(a, b));
    if (it == links_.end()) return std::nullopt;
    return it->second;
}

const Topology::Host& Topology::host(const HostId& id) const {
    auto it = hosts_.find(id);
    if (it == hosts_.end()) throw UnknownHostError(id);
    return it->second;
}

std::optional<HostId> Topology::host_by_ip(wire::Ipv4 ip) const {
    auto it = by_ip_.find(ip);
    if (it == by_ip_.end()) return std::nullopt;
    return it->second;
}

int Topology::port_to_switch(const SwitchId& sw, const SwitchId& peer) const {
    auto it = switch_port_.find(sw);
    if (it == switch_port_.end()) throw UnknownSwitchError(sw);
    auto pit = it->second.find(peer);
    if (pit == it->second.end()) {
        throw TopologyError("switch " + sw + " has no link to " + peer);
    }
    return pit->second;
}

int Topology::port_to_host(const SwitchId& sw, const HostId& host) const {
    if (!has_switch(sw)) throw UnknownSwitchError(sw);
    auto it = host_port_.find(sw);
    if (it != host_port_.end()) {
        auto pit = it->second.find(host);
        if (pit != it->second.end()) return pit->second;
    }
    throw UnknownHostError(host + " is not attached to " + sw);
}

const PortPeer& Topology::port_peer(const SwitchId& sw, int port) const {
    const auto& plist = ports(sw);
    if (port < 1 || port > static_cast<int>(plist.size())) {
        throw TopologyError("switch " + sw + " has no port " + std::to_string(port));
    }
    return plist[static_cast<std::size_t>(port - 1)];
}

const std::vector<PortPeer>& Topology::ports(const SwitchId& sw) const {
    auto it = ports_.find(sw);
    if (it == ports_.end()) throw UnknownSwitchError(sw);
    return it->second;
}

// ---------------------------------------------------------------------------
// Path algorithms
// ---------------------------------------------------------------------------

Path shortest_path(const Topology& g, const SwitchId& s1, const SwitchId& s2) {
    if (!g.has_switch(s1)) throw UnknownSwitchError(s1);
    if (!g.has_switch(s2)) throw UnknownSwitchError(s2);
    if (s1 == s2) return {s1};

    // Hop distance to s2, then a greedy descent from s1 taking the smallest
    // neighbor id at each level: yields the lexicographically smallest
    // minimum-hop sequence.
    std::map<SwitchId, int> dist;
    dist[s2] = 0;
    std::deque<SwitchId> queue{s2};
    while (!queue.empty()) {
        const SwitchId sw = queue.front();
        queue.pop_front();
        for (const auto& [nb, cap] : g.neighbors(sw)) {
            if (!dist.count(nb)) {
                dist[nb] = dist[sw] + 1;
                queue.push_back(nb);
            }
        }
    }
    auto d1 = dist.find(s1);
    if (d1 == dist.end()) throw NoPathError(s1, s2);

    Path path{s1};
    SwitchId cur = s1;
    while (cur != s2) {
        for (const auto& [nb, cap] : g.neighbors(cur)) {
            auto it = dist.find(nb);
            if (it != dist.end() && it->second == dist[cur] - 1) {
                cur = nb;
                path.push_back(cur);
                break;
            }
        }
    }
    return path;
}

std::vector<Path> all_simple_paths(const Topology& g, const SwitchId& s1,
                                   const SwitchId& s2, int max_hops) {
    if (!g.has_switch(s1)) throw UnknownSwitchError(s1);
    if (!g.has_switch(s2)) throw UnknownSwitchError(s2);
    if (s1 == s2) throw TopologyError("all_simple_paths requires distinct endpoints");

    std::vector<Path> result;
    Path current{s1};
    std::set<SwitchId> visited{s1};

    // Sorted adjacency makes the DFS emit sequences in lexicographic order.
    auto dfs = [&](auto&& self, const SwitchId& node) -> void {
        if (node == s2) {
            result.push_back(current);
            return;
        }
        if (hop_len(current) >= max_hops) return;
        for (const auto& [nb, cap] : g.neighbors(node)) {
            if (visited.count(nb)) continue;
            visited.insert(nb);
            current.push_back(nb);
            self(self, nb);
            current.pop_back();
            visited.erase(nb);
        }
    };
    dfs(dfs, s1);
    return result;
}

int shared_edges(const Path& p, const Path& q) {
    std::set<Topology::LinkKey> edges;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        edges.insert(Topology::link_key(p[i], p[i + 1]));
    }
    int count = 0;
    for (std::size_t i = 0; i + 1 < q.size(); ++i) {
        count += edges.count(Topology::link_key(q[i], q[i + 1]));
    }
    return count;
}

PathSet::PathSet(std::vector<Path> paths) : paths_(std::move(paths)) {
    if (paths_.empty()) throw TopologyError("a path set needs at least one path");
}

const Path& PathSet::next() {
    const Path& out = paths_[cursor_];
    cursor_ = (cursor_ + 1) % paths_.size();
    return out;
}

PathSet compute_path_set(const Topology& g, const SwitchId& s1, const SwitchId& s2,
                         const PathSetOptions& opts) {
    const Path primary = shortest_path(g, s1, s2);
    if (s1 == s2) return PathSet({primary});

    std::vector<Path> alternates = all_simple_paths(g, s1, s2, opts.max_hops);
    std::erase(alternates, primary);
    std::sort(alternates.begin(), alternates.end(), [&](const Path& a, const Path& b) {
        return std::make_tuple(shared_edges(a, primary), hop_len(a), std::cref(a)) <
               std::make_tuple(shared_edges(b, primary), hop_len(b), std::cref(b));
    });

    std::vector<Path> paths;
    paths.reserve(std::min<std::size_t>(alternates.size() + 1,
                                        static_cast<std::size_t>(opts.max_paths)));
    paths.push_back(primary);
    for (auto& alt : alternates) {
        if (static_cast<int>(paths.size()) >= opts.max_paths) break;
        paths.push_back(std::move(alt));
    }
    return PathSet(std::move(paths));
}

Topology spanning_tree(const Topology& g) {
    Topology::Builder builder;
    for (const auto& sw : g.switches()) builder.add_switch(sw);

    const SwitchId root = *g.switches().begin();
    std::set<SwitchId> visited{root};
    std::deque<SwitchId> queue{root};
    while (!queue.empty()) {
        const SwitchId sw = queue.front();
        queue.pop_front();
        for (const auto& [nb, cap] : g.neighbors(sw)) {
            if (visited.insert(nb).second) {
                builder.add_link(sw, nb, cap);
                queue.push_back(nb);
            }
        }
    }
    for (const auto& [host_id, host] : g.hosts()) {
        builder.add_host(host_id, host.attached, host.ip);
    }
    return builder.build();
}

// ---------------------------------------------------------------------------
// Topology file grammar
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream iss(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (iss >> tok) tokens.push_back(tok);
    return tokens;
}

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

double parse_capacity(const std::string& tok, int line) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError(line, "bad capacity: " + tok);
    }
    return value;
}

}  // namespace

Topology parse_topology(std::istream& in) {
    Topology::Builder builder;
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

        try {
            if (tokens[0] == "switch" && tokens.size() == 2) {
                builder.add_switch(tokens[1]);
            } else if (tokens[0] == "link" && tokens.size() == 4) {
                builder.add_link(tokens[1], tokens[2], parse_capacity(tokens[3], lineno));
            } else if (tokens[0] == "host" && tokens.size() == 4) {
                auto ip = wire::parse_ipv4(tokens[3]);
                if (!ip) throw ParseError(lineno, "bad ip: " + tokens[3]);
                builder.add_host(tokens[1], tokens[2], *ip);
            } else {
                throw ParseError(lineno, "unrecognized directive: " + tokens[0]);
            }
        } catch (const TopologyError& e) {
            throw ParseError(lineno, e.what());
        }
    }
    if (!saw_format) throw ParseError(lineno == 0 ? 1 : lineno, "missing format=1 header");
    return builder.build();
}

}  // namespace smoc::net
