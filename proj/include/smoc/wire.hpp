#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Packet model and binary codec for the simplified TCP+MPTCP handshake
// messages the controller consumes.
//
// Frame layout (network byte order, 16 or 26 bytes total):
//   [0..4)   src_ip
//   [4..8)   dst_ip
//   [8..10)  src_port
//   [10..12) dst_port
//   [12]     flags bitmask (bit0 SYN, bit1 ACK, bit2 FIN, bit3 RST)
//   [13..15) payload_len
//   [15]     option_len L (0 or 10)
//   if L=10:
//   [16]     subtype (0x00 MP_CAPABLE, 0x01 MP_JOIN)
//   [17]     reserved (written as 0x00, ignored on decode)
//   [18..26) 64-bit key
namespace smoc::wire {

using Ipv4 = std::uint32_t;  // host byte order in memory

std::string format_ipv4(Ipv4 ip);
std::optional<Ipv4> parse_ipv4(std::string_view text);

struct EndpointPair {
    Ipv4 src_ip = 0;
    std::uint16_t src_port = 0;
    Ipv4 dst_ip = 0;
    std::uint16_t dst_port = 0;

    EndpointPair reversed() const {
        return {dst_ip, dst_port, src_ip, src_port};
    }
    auto operator<=>(const EndpointPair&) const = default;
};

// "1.2.3.4:80->5.6.7.8:90", used by audit lines and CLI output.
std::string format_flow(const EndpointPair& ep);

// TCP flag bits as carried in the frame's flags byte.
inline constexpr std::uint8_t kSyn = 0x01;
inline constexpr std::uint8_t kAck = 0x02;
inline constexpr std::uint8_t kFin = 0x04;
inline constexpr std::uint8_t kRst = 0x08;
inline constexpr std::uint8_t kAllFlags = kSyn | kAck | kFin | kRst;

std::string format_flags(std::uint8_t flags);

struct MpCapable {
    std::uint64_t key = 0;
    bool operator==(const MpCapable&) const = default;
};

struct MpJoin {
    std::uint64_t peer_key = 0;
    bool operator==(const MpJoin&) const = default;
};

using MptcpOption = std::variant<MpCapable, MpJoin>;

struct Packet {
    EndpointPair endpoints;
    std::uint8_t tcp_flags = 0;
    std::optional<MptcpOption> mptcp;
    std::uint16_t payload_len = 0;

    bool syn() const { return tcp_flags & kSyn; }
    bool ack() const { return tcp_flags & kAck; }
    bool operator==(const Packet&) const = default;
};

enum class PacketClass {
    MpCapableSyn,
    MpCapableSynAck,
    MpJoinSyn,
    MpJoinSynAck,
    PlainTcp,
    NonHandshake,
};

std::string_view to_string(PacketClass c);

enum class DecodeErrorCode {
    TruncatedFrame,  // input shorter than the declared frame
    UnknownSubtype,  // MPTCP subtype byte not 0x00/0x01
    BadLength,       // option length not 0/10, or trailing bytes
};

std::string_view to_string(DecodeErrorCode c);

struct DecodeError {
    DecodeErrorCode code;
    std::string message;
};

using DecodeResult = std::variant<Packet, DecodeError>;

inline constexpr std::size_t kBaseFrameSize = 16;
inline constexpr std::size_t kOptionLen = 10;
inline constexpr std::size_t kMaxFrameSize = kBaseFrameSize + kOptionLen;
inline constexpr std::uint8_t kSubtypeCapable = 0x00;
inline constexpr std::uint8_t kSubtypeJoin = 0x01;

// Canonical encoding: exactly one byte sequence per Packet value. Flag bits
// outside the four defined ones are dropped.
std::vector<std::uint8_t> encode_packet(const Packet& p);

DecodeResult decode_packet(std::span<const std::uint8_t> bytes);

// Total over (tcp_flags, mptcp presence/variant); never fails.
PacketClass classify(const Packet& p);

// Advisory checks on an otherwise well-formed packet: zero keys are
// suspicious, handshake packets carrying an option must have no payload.
// Returns one message per finding, empty when clean.
std::vector<std::string> lint_packet(const Packet& p);

// Hex helpers for frame fixtures and the decode subcommand.
std::optional<std::vector<std::uint8_t>> parse_hex(std::string_view text);
std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace smoc::wire
