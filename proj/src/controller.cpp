#include "smoc/controller.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "smoc/errors.hpp"

namespace smoc::ctrl {

namespace {

std::string key_hex(std::uint64_t key) {
    char buf[2 + 16 + 1];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(key));
    return buf;
}

std::string endpoint(wire::Ipv4 ip, std::uint16_t port) {
    return wire::format_ipv4(ip) + ":" + std::to_string(port);
}

struct Attachment {
    net::HostId src_host;
    net::HostId dst_host;
    net::SwitchId src_sw;
    net::SwitchId dst_sw;
};

Attachment resolve_endpoints(const net::Topology& topo, const wire::EndpointPair& ep) {
    auto src = topo.host_by_ip(ep.src_ip);
    if (!src) throw UnknownHostError(wire::format_ipv4(ep.src_ip));
    auto dst = topo.host_by_ip(ep.dst_ip);
    if (!dst) throw UnknownHostError(wire::format_ipv4(ep.dst_ip));
    return {*src, *dst, topo.host(*src).attached, topo.host(*dst).attached};
}

void require_switch(const net::Topology& topo, const net::SwitchId& sw) {
    if (!topo.has_switch(sw)) throw UnknownSwitchError(sw);
}

}  // namespace

std::vector<FlowRule> install_path(const net::Topology& topo, const net::Path& route,
                                   const wire::EndpointPair& match,
                                   const net::HostId& src_host,
                                   const net::HostId& dst_host) {
    if (route.empty()) throw TopologyError("cannot install an empty route");
    if (topo.host(src_host).attached != route.front()) {
        throw HostNotOnPathError("host " + src_host + " is not attached to route head " +
                                 route.front());
    }
    if (topo.host(dst_host).attached != route.back()) {
        throw HostNotOnPathError("host " + dst_host + " is not attached to route tail " +
                                 route.back());
    }
    std::vector<FlowRule> rules;
    rules.reserve(route.size());
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
        rules.push_back({route[i], match, topo.port_to_switch(route[i], route[i + 1])});
    }
    rules.push_back({route.back(), match, topo.port_to_host(route.back(), dst_host)});
    return rules;
}

std::string format_audit_line(wire::PacketClass cls, const wire::EndpointPair& ep,
                              const Decision& d) {
    std::string out = "event=";
    out += wire::to_string(cls);
    out += " src=" + endpoint(ep.src_ip, ep.src_port);
    out += " dst=" + endpoint(ep.dst_ip, ep.dst_port);
    out += " route=" + net::format_path(d.route);
    out += " rules=" + std::to_string(d.rules.size());
    out += " delta=";
    if (d.table_delta.empty()) {
        out += '-';
    } else {
        for (std::size_t i = 0; i < d.table_delta.size(); ++i) {
            if (i > 0) out += ';';
            out += d.table_delta[i];
        }
    }
    out += " note=";
    out += d.note.empty() ? "-" : d.note;
    return out;
}

SmocController::SmocController(const net::Topology& topo, SmocOptions opts)
    : topo_(topo), opts_(opts) {}

std::shared_ptr<net::PathSet> SmocController::path_set_between(
    const net::SwitchId& s1, const net::SwitchId& s2) const {
    return std::make_shared<net::PathSet>(net::compute_path_set(topo_, s1, s2, opts_.path_opts));
}

void SmocController::advance_time(double now) {
    now_ = now;
    if (std::isfinite(opts_.pending_ttl)) {
        std::erase_if(tables_.pending_capable, [&](const auto& kv) {
            return now_ - kv.second.created_at > opts_.pending_ttl;
        });
        std::erase_if(tables_.pending_join, [&](const auto& kv) {
            return now_ - kv.second.created_at > opts_.pending_ttl;
        });
    }
    if (std::isfinite(opts_.connection_ttl)) {
        std::erase_if(tables_.mptcp_connections, [&](const auto& kv) {
            return now_ - kv.second.last_used > opts_.connection_ttl;
        });
    }
}

Decision SmocController::handle_packet_in(const PacketInEvent& ev) {
    require_switch(topo_, ev.sw);
    const wire::Packet& p = ev.packet;
    const wire::EndpointPair& ep = p.endpoints;
    const Attachment at = resolve_endpoints(topo_, ep);
    const wire::PacketClass cls = wire::classify(p);

    Decision d;
    auto fall_back = [&](const char* note) {
        d.route = net::shortest_path(topo_, at.src_sw, at.dst_sw);
        d.note = note;
    };
    // A join proves the whole session is alive, so both directional entries
    // get a fresh idle timer.
    auto touch_session = [&](auto conn) {
        conn->second.last_used = now_;
        if (auto peer = tables_.mptcp_connections.find(conn->second.peer_key);
            peer != tables_.mptcp_connections.end()) {
            peer->second.last_used = now_;
        }
    };

    switch (cls) {
        case wire::PacketClass::MpCapableSyn: {
            const std::uint64_t key = std::get<wire::MpCapable>(*p.mptcp).key;
            auto it = tables_.pending_capable.find(ep);
            if (it != tables_.pending_capable.end() && it->second.initiator_key == key) {
                // Retransmitted SYN: reissue the remembered route, cursor
                // untouched.
                d.route = it->second.assigned_route;
                d.note = "retransmit";
                break;
            }
            if (it != tables_.pending_capable.end()) {
                // Same 5-tuple, new key: the old attempt was abandoned.
                tables_.pending_capable.erase(it);
                d.table_delta.push_back("pending_capable-=" + wire::format_flow(ep));
            }
            auto forward = path_set_between(at.src_sw, at.dst_sw);
            d.route = forward->next();
            tables_.pending_capable[ep] = {key, forward, d.route, now_};
            d.table_delta.push_back("pending_capable+=" + wire::format_flow(ep));
            break;
        }
        case wire::PacketClass::MpCapableSynAck: {
            const std::uint64_t responder_key = std::get<wire::MpCapable>(*p.mptcp).key;
            auto it = tables_.pending_capable.find(ep.reversed());
            if (it == tables_.pending_capable.end()) {
                fall_back("no_pending_capable");
                break;
            }
            const std::uint64_t initiator_key = it->second.initiator_key;
            if (initiator_key == responder_key ||
                tables_.mptcp_connections.count(initiator_key) != 0 ||
                tables_.mptcp_connections.count(responder_key) != 0) {
                // Refusing the insert keeps the established session that
                // already owns the key intact.
                fall_back("key_collision");
                break;
            }
            auto reply = path_set_between(at.src_sw, at.dst_sw);
            d.route = reply->next();
            tables_.mptcp_connections[initiator_key] = {responder_key, reply, now_};
            tables_.mptcp_connections[responder_key] = {initiator_key, it->second.forward, now_};
            tables_.pending_capable.erase(it);
            d.table_delta.push_back("mptcp_connections+=" + key_hex(initiator_key));
            d.table_delta.push_back("mptcp_connections+=" + key_hex(responder_key));
            d.table_delta.push_back("pending_capable-=" + wire::format_flow(ep.reversed()));
            break;
        }
        case wire::PacketClass::MpJoinSyn: {
            const std::uint64_t presented = std::get<wire::MpJoin>(*p.mptcp).peer_key;
            auto pending = tables_.pending_join.find(ep);
            if (pending != tables_.pending_join.end() &&
                pending->second.presented_key == presented) {
                d.route = pending->second.assigned_route;
                d.note = "retransmit";
                break;
            }
            auto conn = tables_.mptcp_connections.find(presented);
            if (conn == tables_.mptcp_connections.end()) {
                fall_back("unknown_session");
                break;
            }
            if (pending != tables_.pending_join.end()) {
                tables_.pending_join.erase(pending);
                d.table_delta.push_back("pending_join-=" + wire::format_flow(ep));
            }
            touch_session(conn);
            d.route = conn->second.toward_owner->next();
            tables_.pending_join[ep] = {conn->second.peer_key, presented,
                                        conn->second.toward_owner, d.route, now_};
            d.table_delta.push_back("pending_join+=" + wire::format_flow(ep));
            break;
        }
        case wire::PacketClass::MpJoinSynAck: {
            auto pending = tables_.pending_join.find(ep.reversed());
            if (pending == tables_.pending_join.end()) {
                fall_back("no_pending_join");
                break;
            }
            auto conn = tables_.mptcp_connections.find(pending->second.session_key);
            if (conn == tables_.mptcp_connections.end()) {
                // The session vanished (TTL eviction) while the join was in
                // flight.
                tables_.pending_join.erase(pending);
                d.table_delta.push_back("pending_join-=" + wire::format_flow(ep.reversed()));
                fall_back("unknown_session");
                break;
            }
            touch_session(conn);
            d.route = conn->second.toward_owner->next();
            tables_.pending_join.erase(pending);
            d.table_delta.push_back("pending_join-=" + wire::format_flow(ep.reversed()));
            break;
        }
        case wire::PacketClass::PlainTcp:
        case wire::PacketClass::NonHandshake: {
            // Not session-building traffic; route it without touching state.
            d.route = net::shortest_path(topo_, at.src_sw, at.dst_sw);
            break;
        }
    }

    d.rules = install_path(topo_, d.route, ep, at.src_host, at.dst_host);
    return d;
}

SpanningTreeController::SpanningTreeController(const net::Topology& topo)
    : topo_(topo), tree_(net::spanning_tree(topo)) {}

Decision SpanningTreeController::handle_packet_in(const PacketInEvent& ev) {
    require_switch(topo_, ev.sw);
    const Attachment at = resolve_endpoints(topo_, ev.packet.endpoints);
    Decision d;
    // The tree contains every switch, so its unique path is the tree's
    // shortest path; ports come from the full topology.
    d.route = net::shortest_path(tree_, at.src_sw, at.dst_sw);
    d.rules = install_path(topo_, d.route, ev.packet.endpoints, at.src_host, at.dst_host);
    return d;
}

ShortestPathController::ShortestPathController(const net::Topology& topo) : topo_(topo) {}

Decision ShortestPathController::handle_packet_in(const PacketInEvent& ev) {
    require_switch(topo_, ev.sw);
    const Attachment at = resolve_endpoints(topo_, ev.packet.endpoints);
    Decision d;
    d.route = net::shortest_path(topo_, at.src_sw, at.dst_sw);
    d.rules = install_path(topo_, d.route, ev.packet.endpoints, at.src_host, at.dst_host);
    return d;
}

}  // namespace smoc::ctrl
