#include "smoc/wire.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace smoc::wire {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    put_u16(out, static_cast<std::uint16_t>(v >> 16));
    put_u16(out, static_cast<std::uint16_t>(v & 0xffff));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
    put_u32(out, static_cast<std::uint32_t>(v & 0xffffffff));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint16_t>((b[off] << 8) | b[off + 1]);
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
    return (static_cast<std::uint32_t>(get_u16(b, off)) << 16) | get_u16(b, off + 2);
}

std::uint64_t get_u64(std::span<const std::uint8_t> b, std::size_t off) {
    return (static_cast<std::uint64_t>(get_u32(b, off)) << 32) | get_u32(b, off + 4);
}

}  // namespace

std::string format_ipv4(Ipv4 ip) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", (ip >> 24) & 0xff,
                  (ip >> 16) & 0xff, (ip >> 8) & 0xff, ip & 0xff);
    return buf;
}

std::optional<Ipv4> parse_ipv4(std::string_view text) {
    Ipv4 ip = 0;
    const char* p = text.data();
    const char* end = text.data() + text.size();
    for (int i = 0; i < 4; ++i) {
        unsigned octet = 0;
        auto [next, ec] = std::from_chars(p, end, octet);
        if (ec != std::errc{} || next == p || octet > 255) return std::nullopt;
        ip = (ip << 8) | octet;
        p = next;
        if (i < 3) {
            if (p == end || *p != '.') return std::nullopt;
            ++p;
        }
    }
    if (p != end) return std::nullopt;
    return ip;
}

std::string format_flow(const EndpointPair& ep) {
    return format_ipv4(ep.src_ip) + ":" + std::to_string(ep.src_port) + "->" +
           format_ipv4(ep.dst_ip) + ":" + std::to_string(ep.dst_port);
}

std::string format_flags(std::uint8_t flags) {
    std::string s;
    auto add = [&](std::uint8_t bit, const char* name) {
        if (flags & bit) {
            if (!s.empty()) s += '|';
            s += name;
        }
    };
    add(kSyn, "SYN");
    add(kAck, "ACK");
    add(kFin, "FIN");
    add(kRst, "RST");
    return s.empty() ? "-" : s;
}

std::string_view to_string(PacketClass c) {
    switch (c) {
        case PacketClass::MpCapableSyn: return "MpCapableSyn";
        case PacketClass::MpCapableSynAck: return "MpCapableSynAck";
        case PacketClass::MpJoinSyn: return "MpJoinSyn";
        case PacketClass::MpJoinSynAck: return "MpJoinSynAck";
        case PacketClass::PlainTcp: return "PlainTcp";
        case PacketClass::NonHandshake: return "NonHandshake";
    }
    return "?";
}

std::string_view to_string(DecodeErrorCode c) {
    switch (c) {
        case DecodeErrorCode::TruncatedFrame: return "TruncatedFrame";
        case DecodeErrorCode::UnknownSubtype: return "UnknownSubtype";
        case DecodeErrorCode::BadLength: return "BadLength";
    }
    return "?";
}

std::vector<std::uint8_t> encode_packet(const Packet& p) {
    std::vector<std::uint8_t> out;
    out.reserve(p.mptcp ? kMaxFrameSize : kBaseFrameSize);
    put_u32(out, p.endpoints.src_ip);
    put_u32(out, p.endpoints.dst_ip);
    put_u16(out, p.endpoints.src_port);
    put_u16(out, p.endpoints.dst_port);
    out.push_back(p.tcp_flags & kAllFlags);
    put_u16(out, p.payload_len);
    out.push_back(p.mptcp ? static_cast<std::uint8_t>(kOptionLen) : 0);
    if (p.mptcp) {
        if (const auto* cap = std::get_if<MpCapable>(&*p.mptcp)) {
            out.push_back(kSubtypeCapable);
            out.push_back(0x00);
            put_u64(out, cap->key);
        } else {
            out.push_back(kSubtypeJoin);
            out.push_back(0x00);
            put_u64(out, std::get<MpJoin>(*p.mptcp).peer_key);
        }
    }
    return out;
}

DecodeResult decode_packet(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kBaseFrameSize) {
        return DecodeError{DecodeErrorCode::TruncatedFrame,
                           "need at least " + std::to_string(kBaseFrameSize) +
                               " bytes, got " + std::to_string(bytes.size())};
    }
    const std::uint8_t option_len = bytes[15];
    if (option_len != 0 && option_len != kOptionLen) {
        return DecodeError{DecodeErrorCode::BadLength,
                           "option length must be 0 or " + std::to_string(kOptionLen) +
                               ", got " + std::to_string(option_len)};
    }
    const std::size_t declared = kBaseFrameSize + option_len;
    if (bytes.size() < declared) {
        return DecodeError{DecodeErrorCode::TruncatedFrame,
                           "frame declares " + std::to_string(declared) +
                               " bytes, got " + std::to_string(bytes.size())};
    }
    if (bytes.size() > declared) {
        return DecodeError{DecodeErrorCode::BadLength,
                           std::to_string(bytes.size() - declared) +
                               " trailing bytes after declared frame"};
    }

    Packet p;
    p.endpoints.src_ip = get_u32(bytes, 0);
    p.endpoints.dst_ip = get_u32(bytes, 4);
    p.endpoints.src_port = get_u16(bytes, 8);
    p.endpoints.dst_port = get_u16(bytes, 10);
    p.tcp_flags = bytes[12] & kAllFlags;
    p.payload_len = get_u16(bytes, 13);
    if (option_len == kOptionLen) {
        const std::uint8_t subtype = bytes[16];
        const std::uint64_t key = get_u64(bytes, 18);
        switch (subtype) {
            case kSubtypeCapable:
                p.mptcp = MpCapable{key};
                break;
            case kSubtypeJoin:
                p.mptcp = MpJoin{key};
                break;
            default:
                return DecodeError{DecodeErrorCode::UnknownSubtype,
                                   "subtype 0x" + to_hex({&subtype, 1})};
        }
    }
    return p;
}

PacketClass classify(const Packet& p) {
    if (!p.syn()) return PacketClass::NonHandshake;
    if (!p.mptcp) return PacketClass::PlainTcp;
    const bool capable = std::holds_alternative<MpCapable>(*p.mptcp);
    if (capable) {
        return p.ack() ? PacketClass::MpCapableSynAck : PacketClass::MpCapableSyn;
    }
    return p.ack() ? PacketClass::MpJoinSynAck : PacketClass::MpJoinSyn;
}

std::vector<std::string> lint_packet(const Packet& p) {
    std::vector<std::string> findings;
    if (p.mptcp) {
        const std::uint64_t key = std::holds_alternative<MpCapable>(*p.mptcp)
                                      ? std::get<MpCapable>(*p.mptcp).key
                                      : std::get<MpJoin>(*p.mptcp).peer_key;
        if (key == 0) findings.push_back("zero key is suspicious");
        if (p.syn() && p.payload_len != 0) {
            findings.push_back("handshake packet with MPTCP option has nonzero payload_len");
        }
    }
    if (p.endpoints.src_ip == p.endpoints.dst_ip &&
        p.endpoints.src_port == p.endpoints.dst_port) {
        findings.push_back("source and destination endpoints are identical");
    }
    return findings;
}

std::optional<std::vector<std::uint8_t>> parse_hex(std::string_view text) {
    if (text.size() % 2 != 0) return std::nullopt;
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 2);
    for (std::size_t i = 0; i < text.size(); i += 2) {
        const int hi = nibble(text[i]);
        const int lo = nibble(text[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

}  // namespace smoc::wire
