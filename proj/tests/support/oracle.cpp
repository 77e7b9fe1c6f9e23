#include "support/oracle.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <tuple>

namespace oracle {

using smoc::net::Path;
using smoc::net::SwitchId;
using smoc::net::Topology;

std::vector<Path> enumerate_simple_paths(const Topology& topo, const SwitchId& s,
                                         const SwitchId& t, int max_hops) {
    std::vector<Path> found;
    // Stack of partial paths; extend each by every unvisited neighbor.
    std::vector<Path> stack{{s}};
    while (!stack.empty()) {
        Path cur = std::move(stack.back());
        stack.pop_back();
        if (cur.back() == t) {
            found.push_back(cur);
            continue;
        }
        if (static_cast<int>(cur.size()) - 1 >= max_hops) continue;
        for (const auto& [nb, cap] : topo.neighbors(cur.back())) {
            if (std::find(cur.begin(), cur.end(), nb) != cur.end()) continue;
            Path ext = cur;
            ext.push_back(nb);
            stack.push_back(std::move(ext));
        }
    }
    return found;
}

namespace {

using Edge = std::pair<SwitchId, SwitchId>;

std::set<Edge> edge_set(const Path& p) {
    std::set<Edge> edges;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        edges.insert(Topology::link_key(p[i], p[i + 1]));
    }
    return edges;
}

}  // namespace

int overlap_edges(const Path& a, const Path& b) {
    const std::set<Edge> ea = edge_set(a);
    const std::set<Edge> eb = edge_set(b);
    int n = 0;
    for (const auto& e : ea) n += eb.count(e) ? 1 : 0;
    return n;
}

std::vector<Path> expected_path_set(const Topology& topo, const SwitchId& s, const SwitchId& t,
                                    int max_hops, int max_paths) {
    std::vector<Path> all = enumerate_simple_paths(topo, s, t, max_hops);
    // Primary: minimum hop count, ties broken by the smaller sequence.
    auto primary = std::min_element(all.begin(), all.end(), [](const Path& a, const Path& b) {
        return std::make_tuple(a.size(), std::cref(a)) < std::make_tuple(b.size(), std::cref(b));
    });
    Path first = *primary;
    all.erase(primary);
    std::sort(all.begin(), all.end(), [&](const Path& a, const Path& b) {
        return std::make_tuple(overlap_edges(a, first), a.size(), std::cref(a)) <
               std::make_tuple(overlap_edges(b, first), b.size(), std::cref(b));
    });
    std::vector<Path> out{std::move(first)};
    for (auto& p : all) {
        if (static_cast<int>(out.size()) >= max_paths) break;
        out.push_back(std::move(p));
    }
    return out;
}

std::map<std::string, double> waterfill_rates(
    const std::vector<std::pair<std::string, Path>>& flows, const Topology& topo) {
    using LinkKey = Topology::LinkKey;

    std::map<std::string, std::set<LinkKey>> uses;
    std::map<std::string, double> rate;
    for (const auto& [id, path] : flows) {
        rate[id] = 0.0;
        uses[id] = edge_set(path);
    }

    std::map<LinkKey, double> spare = topo.links();
    std::set<std::string> unpriced;
    for (const auto& [id, es] : uses) {
        if (!es.empty()) unpriced.insert(id);
    }

    while (!unpriced.empty()) {
        // Fair share per link among flows not yet priced.
        LinkKey bottleneck;
        double share = std::numeric_limits<double>::infinity();
        std::map<LinkKey, int> count;
        for (const auto& id : unpriced) {
            for (const auto& e : uses[id]) ++count[e];
        }
        for (const auto& [e, n] : count) {
            double s = spare[e] / n;
            if (s < share) {
                share = s;
                bottleneck = e;
            }
        }
        // Price every unpriced flow crossing the bottleneck at the share,
        // then charge those rates to the rest of their links.
        std::vector<std::string> done;
        for (const auto& id : unpriced) {
            if (uses[id].count(bottleneck)) done.push_back(id);
        }
        for (const auto& id : done) {
            rate[id] = share;
            for (const auto& e : uses[id]) spare[e] -= share;
            unpriced.erase(id);
        }
    }
    return rate;
}

Topology random_topology(std::mt19937& rng, int max_switches, bool with_hosts) {
    const int n = std::uniform_int_distribution<int>(2, max_switches)(rng);
    std::vector<SwitchId> ids;
    for (int i = 0; i < n; ++i) ids.push_back(std::string(1, static_cast<char>('a' + i)));

    Topology::Builder builder;
    for (const auto& id : ids) builder.add_switch(id);

    std::uniform_int_distribution<int> cap_step(1, 4);
    auto capacity = [&] { return 50.0 * cap_step(rng); };

    // Random spanning tree keeps the graph connected.
    std::set<std::pair<int, int>> linked;
    for (int i = 1; i < n; ++i) {
        int j = std::uniform_int_distribution<int>(0, i - 1)(rng);
        linked.emplace(j, i);
        builder.add_link(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)],
                         capacity());
    }
    std::bernoulli_distribution extra(0.35);
    for (int j = 0; j < n; ++j) {
        for (int i = j + 1; i < n; ++i) {
            if (linked.count({j, i}) == 0 && extra(rng)) {
                builder.add_link(ids[static_cast<std::size_t>(i)],
                                 ids[static_cast<std::size_t>(j)], capacity());
            }
        }
    }

    if (with_hosts) {
        for (int i = 0; i < n; ++i) {
            builder.add_host("h" + std::to_string(i + 1), ids[static_cast<std::size_t>(i)],
                             0x0a000001u + static_cast<std::uint32_t>(i));
        }
    }
    return builder.build();
}

smoc::wire::Packet random_packet(std::mt19937_64& rng) {
    using namespace smoc::wire;
    Packet p;
    p.endpoints.src_ip = static_cast<Ipv4>(rng());
    p.endpoints.dst_ip = static_cast<Ipv4>(rng());
    p.endpoints.src_port = static_cast<std::uint16_t>(rng());
    p.endpoints.dst_port = static_cast<std::uint16_t>(rng());
    p.tcp_flags = static_cast<std::uint8_t>(rng() & kAllFlags);
    p.payload_len = static_cast<std::uint16_t>(rng());
    switch (rng() % 3) {
        case 0: break;  // no option
        case 1: p.mptcp = MpCapable{rng()}; break;
        case 2: p.mptcp = MpJoin{rng()}; break;
    }
    return p;
}

}  // namespace oracle
