#ifndef NETDIFF_PACKET_HPP
#define NETDIFF_PACKET_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "netdiffusion/fields.hpp"

namespace netdiff {

enum class Transport : uint8_t { kTcp, kUdp, kIcmp, kOther };

inline uint8_t protocol_number(Transport t) {
  switch (t) {
    case Transport::kTcp: return 6;
    case Transport::kUdp: return 17;
    case Transport::kIcmp: return 1;
    default: return 0;
  }
}

inline Transport transport_from_protocol(uint8_t proto) {
  switch (proto) {
    case 6: return Transport::kTcp;
    case 17: return Transport::kUdp;
    case 1: return Transport::kIcmp;
    default: return Transport::kOther;
  }
}

// One raw-IP packet: header bytes only, payload kept as a length.
// Payload content is never stored; on write it is zero-filled so the
// IPv4 total-length field stays truthful.
struct Packet {
  int64_t timestamp_us = 0;
  std::vector<uint8_t> ip_header;         // 20..60 bytes, 4*IHL
  Transport transport = Transport::kOther;
  std::vector<uint8_t> transport_header;  // TCP 20..60, UDP/ICMP 8, OTHER 0
  uint32_t payload_len = 0;

  uint32_t total_length() const {
    return static_cast<uint32_t>(ip_header.size() + transport_header.size()) +
           payload_len;
  }
};

// Checks the structural invariants a Packet must satisfy before it can be
// written or encoded. Returns an explanation for the first failure.
std::optional<std::string> packet_invariant_error(const Packet& p);

struct FiveTuple {
  uint32_t src_ip = 0;
  uint32_t dst_ip = 0;
  uint16_t src_port = 0;
  uint16_t dst_port = 0;
  uint8_t protocol = 0;

  FiveTuple reversed() const {
    return FiveTuple{dst_ip, src_ip, dst_port, src_port, protocol};
  }
  bool operator==(const FiveTuple&) const = default;

  // Direction-insensitive key: the smaller (ip,port) endpoint first.
  std::tuple<uint64_t, uint64_t, uint8_t> unordered_key() const {
    uint64_t a = (uint64_t(src_ip) << 16) | src_port;
    uint64_t b = (uint64_t(dst_ip) << 16) | dst_port;
    if (a > b) std::swap(a, b);
    return {a, b, protocol};
  }
};

FiveTuple tuple_of(const Packet& p);

std::string ip_to_string(uint32_t ip);
uint32_t ip_from_string(const std::string& dotted);  // throws DataError

struct FlowTrace {
  std::vector<Packet> packets;
  FiveTuple five_tuple;
  std::string label;
};

}  // namespace netdiff

#endif
