#include "smoc/fabric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "smoc/errors.hpp"

namespace smoc::sim {

namespace {

constexpr double kEps = 1e-9;

std::string flow_id(const std::string& session, int index) {
    return session + "/" + std::to_string(index);
}

}  // namespace

std::optional<int> deliver(const SwitchState& sw, const wire::Packet& p) {
    auto it = sw.table.find(p.endpoints);
    if (it == sw.table.end()) return std::nullopt;
    return it->second.out_port;
}

std::map<std::string, double> maxmin_allocate(
    const std::vector<std::pair<std::string, net::Path>>& flows,
    const net::Topology& topo) {
    using LinkKey = net::Topology::LinkKey;

    std::map<std::string, double> rate;
    std::map<std::string, std::vector<LinkKey>> edges;
    for (const auto& [id, path] : flows) {
        if (!rate.emplace(id, 0.0).second) throw ConfigError("duplicate flow id: " + id);
        auto& es = edges[id];
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            LinkKey key = net::Topology::link_key(path[i], path[i + 1]);
            if (!topo.link_capacity(path[i], path[i + 1])) {
                throw TopologyError("flow " + id + " uses missing link " + key.first + "-" +
                                    key.second);
            }
            es.push_back(key);
        }
    }

    std::map<LinkKey, double> remaining = topo.links();
    std::set<std::string> active;
    for (const auto& [id, es] : edges) {
        if (!es.empty()) active.insert(id);  // link-free flows stay at rate 0
    }

    while (!active.empty()) {
        std::map<LinkKey, int> load;
        for (const auto& id : active) {
            for (const auto& e : edges[id]) ++load[e];
        }
        double inc = std::numeric_limits<double>::infinity();
        for (const auto& [e, n] : load) inc = std::min(inc, remaining[e] / n);
        inc = std::max(inc, 0.0);

        for (const auto& id : active) rate[id] += inc;
        for (const auto& [e, n] : load) remaining[e] -= inc * n;

        // Freeze every flow that crosses a now-saturated link. The
        // bottleneck link of this round always saturates, so each round
        // retires at least one flow.
        std::erase_if(active, [&](const std::string& id) {
            const auto& es = edges[id];
            return std::any_of(es.begin(), es.end(),
                               [&](const LinkKey& e) { return remaining[e] <= kEps; });
        });
    }
    return rate;
}

void assign_session_keys(std::vector<Session>& sessions, std::uint64_t seed) {
    std::vector<Session*> order;
    order.reserve(sessions.size());
    for (auto& s : sessions) order.push_back(&s);
    std::sort(order.begin(), order.end(),
              [](const Session* a, const Session* b) { return a->id < b->id; });

    std::set<std::uint64_t> used;
    for (const auto& s : sessions) {
        if (s.initiator_key != 0) used.insert(s.initiator_key);
        if (s.listener_key != 0) used.insert(s.listener_key);
    }
    std::mt19937_64 rng(seed);
    auto draw = [&] {
        std::uint64_t k;
        do {
            k = rng();
        } while (k == 0 || !used.insert(k).second);
        return k;
    };
    for (Session* s : order) {
        if (s->initiator_key == 0 && s->listener_key == 0) {
            s->initiator_key = draw();
            s->listener_key = draw();
        }
    }
}

namespace {

// Internal per-subflow bookkeeping on top of the public Subflow record.
struct SubflowRun {
    Subflow pub;
    std::optional<double> fwd_active;  // when the data-direction rules turn on
    std::optional<double> rev_active;
};

struct PendingRule {
    ctrl::FlowRule rule;
    double active_at = 0;
};

class Sim {
public:
    Sim(const net::Topology& topo, std::vector<Session> sessions, ctrl::Controller& controller,
        const SimConfig& cfg)
        : topo_(topo), sessions_(std::move(sessions)), controller_(controller), cfg_(cfg) {
        if (cfg_.step <= 0) throw ConfigError("step must be positive");
        if (cfg_.duration <= 0) throw ConfigError("duration must be positive");
        steps_ = static_cast<long long>(std::ceil(cfg_.duration / cfg_.step - kEps));
        validate();
        for (const auto& sw : topo_.switches()) {
            switches_.emplace(sw, SwitchState{sw, {}, topo_.ports(sw)});
        }
    }

    RunResult run() {
        RunResult out;
        for (const auto& s : sessions_) out.series.session_ids.push_back(s.id);
        for (const auto& [key, cap] : topo_.links()) {
            out.series.link_names.push_back(key.first + "-" + key.second);
        }

        subflows_.resize(sessions_.size());
        for (std::size_t pos = 0; pos < sessions_.size(); ++pos) {
            subflows_[pos].resize(static_cast<std::size_t>(sessions_[pos].subflows));
        }

        std::vector<bool> started(sessions_.size(), false);
        for (long long i = 0; i < steps_; ++i) {
            const double now = static_cast<double>(i) * cfg_.step;
            controller_.advance_time(now);
            flush_pending(now);
            for (std::size_t pos = 0; pos < sessions_.size(); ++pos) {
                if (!started[pos] && sessions_[pos].start_time <= now + kEps) {
                    started[pos] = true;
                    emit_handshakes(pos, now, out.audit);
                }
            }
            settle_established(now);
            record_step(now, out.series);
        }

        for (const auto& per_session : subflows_) {
            for (const auto& sf : per_session) out.subflows.push_back(sf.pub);
        }
        return out;
    }

private:
    void validate() const {
        if (cfg_.step <= 0) throw ConfigError("step must be positive");
        if (cfg_.duration <= 0) throw ConfigError("duration must be positive");
        if (cfg_.install_delay < 0) throw ConfigError("install_delay must be non-negative");
        if (steps_ < 1) throw ConfigError("duration shorter than one step");
        const double last = static_cast<double>(steps_ - 1) * cfg_.step;

        std::set<std::string> ids;
        std::set<std::uint64_t> keys;
        for (std::size_t pos = 0; pos < sessions_.size(); ++pos) {
            const Session& s = sessions_[pos];
            if (s.id.empty()) throw ConfigError("session id must be non-empty");
            if (!ids.insert(s.id).second) throw ConfigError("duplicate session id: " + s.id);
            if (s.subflows < 1) throw ConfigError("session " + s.id + ": subflows must be >= 1");
            if (s.subflows > kMaxSubflows) {
                throw ConfigError("session " + s.id + ": at most " +
                                  std::to_string(kMaxSubflows) + " subflows");
            }
            if (topo_.hosts().count(s.initiator) == 0) {
                throw ConfigError("session " + s.id + ": unknown host " + s.initiator);
            }
            if (topo_.hosts().count(s.listener) == 0) {
                throw ConfigError("session " + s.id + ": unknown host " + s.listener);
            }
            if (s.initiator == s.listener) {
                throw ConfigError("session " + s.id + ": endpoints must differ");
            }
            if (s.start_time < 0 || s.start_time > last + kEps) {
                throw ConfigError("session " + s.id + ": start time outside the run");
            }
            if (s.initiator_key == 0 || s.listener_key == 0) {
                throw ConfigError("session " + s.id + ": keys not assigned");
            }
            if (!keys.insert(s.initiator_key).second || !keys.insert(s.listener_key).second) {
                throw ConfigError("session " + s.id + ": duplicate handshake key");
            }
            if (kBasePort + pos * kPortsPerSession + (s.subflows - 1) > 65535) {
                throw ConfigError("too many sessions for the port scheme");
            }
        }
    }

    void flush_pending(double now) {
        std::erase_if(pending_, [&](const PendingRule& p) {
            if (p.active_at > now + kEps) return false;
            install(p.rule);
            return true;
        });
    }

    void install(const ctrl::FlowRule& rule) {
        switches_.at(rule.sw).table[rule.match] = rule;
    }

    void queue_rules(const std::vector<ctrl::FlowRule>& rules, double active_at, double now) {
        for (const auto& r : rules) {
            if (active_at <= now + kEps) {
                install(r);
            } else {
                pending_.push_back({r, active_at});
            }
        }
    }

    struct SendOutcome {
        enum class Kind { Routed, Delivered, Blocked } kind;
        net::Path route;
        double active_at = 0;
    };

    // Walks the packet from its origin host. On a table miss the
    // controller decides; its rules are queued and the packet itself is
    // forwarded to the destination by the controller (packet-out), so one
    // handshake packet raises at most one packet-in.
    SendOutcome send_packet(const wire::Packet& packet, const net::HostId& origin, double now,
                            std::vector<std::string>& audit) {
        net::SwitchId cur = topo_.host(origin).attached;
        int in_port = topo_.port_to_host(cur, origin);
        const std::size_t hop_budget = topo_.switches().size() + 1;
        for (std::size_t hops = 0; hops <= hop_budget; ++hops) {
            const SwitchState& state = switches_.at(cur);
            std::optional<int> port = deliver(state, packet);
            if (!port) {
                ctrl::PacketInEvent ev{cur, in_port, packet};
                ctrl::Decision d;
                try {
                    d = controller_.handle_packet_in(ev);
                } catch (const Error& e) {
                    audit.push_back("error flow=" + wire::format_flow(packet.endpoints) +
                                    " msg=" + e.what());
                    return {SendOutcome::Kind::Blocked, {}, 0};
                }
                const double active_at = now + cfg_.install_delay;
                queue_rules(d.rules, active_at, now);
                audit.push_back(
                    ctrl::format_audit_line(wire::classify(packet), packet.endpoints, d));
                return {SendOutcome::Kind::Routed, d.route, active_at};
            }
            const net::PortPeer& peer = state.ports.at(static_cast<std::size_t>(*port - 1));
            if (peer.kind == net::PortPeer::Kind::Host) {
                return {SendOutcome::Kind::Delivered, {}, 0};
            }
            in_port = topo_.port_to_switch(peer.id, cur);
            cur = peer.id;
        }
        audit.push_back("error flow=" + wire::format_flow(packet.endpoints) +
                        " msg=forwarding loop");
        return {SendOutcome::Kind::Blocked, {}, 0};
    }

    void emit_handshakes(std::size_t pos, double now, std::vector<std::string>& audit) {
        const Session& s = sessions_[pos];
        const wire::Ipv4 src_ip = topo_.host(s.initiator).ip;
        const wire::Ipv4 dst_ip = topo_.host(s.listener).ip;

        for (int idx = 0; idx < s.subflows; ++idx) {
            SubflowRun& sf = subflows_[pos][static_cast<std::size_t>(idx)];
            sf.pub.session_id = s.id;
            sf.pub.index = idx;
            sf.pub.tuple = {src_ip,
                            static_cast<std::uint16_t>(kBasePort + pos * kPortsPerSession + idx),
                            dst_ip, kDataPort};

            const bool first = idx == 0;
            wire::Packet syn{sf.pub.tuple, wire::kSyn,
                             first ? wire::MptcpOption{wire::MpCapable{s.initiator_key}}
                                   : wire::MptcpOption{wire::MpJoin{s.listener_key}},
                             0};
            SendOutcome fwd = send_packet(syn, s.initiator, now, audit);
            if (fwd.kind == SendOutcome::Kind::Blocked) {
                sf.pub.state = SubflowState::Blocked;
                continue;
            }
            if (fwd.kind == SendOutcome::Kind::Routed) {
                sf.pub.route = fwd.route;
                sf.fwd_active = fwd.active_at;
            }

            wire::Packet synack{sf.pub.tuple.reversed(),
                                static_cast<std::uint8_t>(wire::kSyn | wire::kAck),
                                first ? wire::MptcpOption{wire::MpCapable{s.listener_key}}
                                      : wire::MptcpOption{wire::MpJoin{s.initiator_key}},
                                0};
            SendOutcome rev = send_packet(synack, s.listener, now, audit);
            if (rev.kind == SendOutcome::Kind::Blocked) {
                sf.pub.state = SubflowState::Blocked;
                continue;
            }
            if (rev.kind == SendOutcome::Kind::Routed) {
                sf.rev_active = rev.active_at;
            }
        }
    }

    void settle_established(double now) {
        for (auto& per_session : subflows_) {
            for (auto& sf : per_session) {
                if (sf.pub.state != SubflowState::Handshaking) continue;
                if (sf.fwd_active && sf.rev_active &&
                    now + kEps >= std::max(*sf.fwd_active, *sf.rev_active)) {
                    sf.pub.state = SubflowState::Established;
                }
            }
        }
    }

    void record_step(double now, ThroughputSeries& series) {
        std::vector<std::pair<std::string, net::Path>> flows;
        for (std::size_t pos = 0; pos < sessions_.size(); ++pos) {
            for (const auto& sf : subflows_[pos]) {
                if (sf.pub.state == SubflowState::Established && sf.pub.route) {
                    flows.emplace_back(flow_id(sessions_[pos].id, sf.pub.index), *sf.pub.route);
                }
            }
        }
        std::map<std::string, double> rate = maxmin_allocate(flows, topo_);

        ThroughputSeries::Row row;
        row.time = now;
        row.session_rates.assign(sessions_.size(), 0.0);
        std::map<net::Topology::LinkKey, double> util;
        for (const auto& [key, cap] : topo_.links()) util[key] = 0.0;

        std::map<std::string, std::size_t> col;
        for (std::size_t pos = 0; pos < sessions_.size(); ++pos) col[sessions_[pos].id] = pos;
        for (const auto& [id, path] : flows) {
            const double r = rate.at(id);
            row.session_rates[col.at(id.substr(0, id.rfind('/')))] += r;
            for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                util[net::Topology::link_key(path[i], path[i + 1])] += r;
            }
        }
        for (const auto& [key, cap] : topo_.links()) {
            double u = util.at(key);
            if (u > cap + 1e-6) {
                throw TopologyError("capacity exceeded on " + key.first + "-" + key.second);
            }
            row.link_util.push_back(std::min(u, cap));
        }
        series.rows.push_back(std::move(row));
    }

    static constexpr int kMaxSubflows = 64;
    static constexpr int kBasePort = 40000;
    static constexpr int kPortsPerSession = 64;
    static constexpr std::uint16_t kDataPort = 5001;

    const net::Topology& topo_;
    std::vector<Session> sessions_;  // sorted by id
    ctrl::Controller& controller_;
    SimConfig cfg_;
    long long steps_ = 0;

    std::map<net::SwitchId, SwitchState> switches_;
    std::vector<PendingRule> pending_;
    std::vector<std::vector<SubflowRun>> subflows_;  // [session position][index]
};

}  // namespace

RunResult run(const net::Topology& topo, std::vector<Session> sessions,
              ctrl::Controller& controller, const SimConfig& cfg) {
    std::sort(sessions.begin(), sessions.end(),
              [](const Session& a, const Session& b) { return a.id < b.id; });
    assign_session_keys(sessions, cfg.seed);
    return Sim(topo, std::move(sessions), controller, cfg).run();
}

Summary summarize(const ThroughputSeries& series) {
    Summary out;
    if (series.rows.empty()) return out;
    const auto& last = series.rows.back();
    for (std::size_t i = 0; i < series.session_ids.size(); ++i) {
        SessionSummary s;
        s.id = series.session_ids[i];
        s.steady = last.session_rates[i];
        std::size_t first = series.rows.size() - 1;
        while (first > 0 &&
               std::abs(series.rows[first - 1].session_rates[i] - s.steady) <= 1e-9) {
            --first;
        }
        s.time_to_steady = series.rows[first].time;
        out.sessions.push_back(std::move(s));
        out.aggregate_steady += last.session_rates[i];
    }
    return out;
}

}  // namespace smoc::sim
