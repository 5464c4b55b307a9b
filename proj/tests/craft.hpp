#ifndef NETDIFF_TESTS_CRAFT_HPP
#define NETDIFF_TESTS_CRAFT_HPP

// Deterministic packet/flow builders shared by the unit and acceptance
// suites. All crafted packets carry correct checksums and consistent
// seq/ack chains unless a test corrupts them on purpose.

#include <cstdint>
#include <span>
#include <vector>

#include "netdiffusion/packet.hpp"
#include "netdiffusion/rng.hpp"

namespace craft {

struct TcpArgs {
  uint32_t src_ip = 0, dst_ip = 0;
  uint16_t src_port = 0, dst_port = 0;
  uint32_t seq = 0, ack = 0;
  uint8_t flags = 0;
  uint16_t window = 0;
  uint8_t ttl = 64;
  uint8_t tos = 0;
  uint16_t ident = 0;
  uint16_t urgent_ptr = 0;
  uint32_t payload_len = 0;
  int64_t timestamp_us = 0;
  std::vector<uint8_t> tcp_options;  // padded to 4 bytes by the builder
  std::vector<uint8_t> ip_options;
};
netdiff::Packet tcp_packet(const TcpArgs& a);

struct UdpArgs {
  uint32_t src_ip = 0, dst_ip = 0;
  uint16_t src_port = 0, dst_port = 0;
  uint8_t ttl = 64;
  uint16_t ident = 0;
  uint32_t payload_len = 0;
  int64_t timestamp_us = 0;
};
netdiff::Packet udp_packet(const UdpArgs& a);

struct IcmpArgs {
  uint32_t src_ip = 0, dst_ip = 0;
  uint8_t type = 8, code = 0;
  uint16_t ident = 0, seq = 0;
  uint8_t ttl = 64;
  uint32_t payload_len = 0;
  int64_t timestamp_us = 0;
};
netdiff::Packet icmp_packet(const IcmpArgs& a);

// 1024-packet single-connection TCP capture with fixed summary numbers:
// byte count 1100406, duration 602296 us, flags ACK:1023/URG:16,
// avg window 32739.95 (2dp), avg TTL 186.51 (2dp), endpoints
// 192.168.43.37:46508 (303 packets) <-> 54.182.199.148:443 (721).
std::vector<netdiff::Packet> reference_capture();

// Crafted "video streaming" class: TCP flows with full handshakes,
// constant 40-byte TCP headers (20 bytes of options), a small server
// pool, and varying lengths/payloads. Fully protocol-compliant.
std::vector<netdiff::FlowTrace> streaming_corpus(int n_flows, uint64_t seed);

netdiff::FlowTrace udp_flow(int n_packets, uint64_t seed);
netdiff::FlowTrace icmp_flow(int n_packets, uint64_t seed);

// Random-but-valid flow for codec roundtrip properties: one protocol and
// tuple per flow, random field values, random IPv4/TCP options, varying
// IHL/data offset.
netdiff::FlowTrace random_flow(netdiff::Rng& rng);

}  // namespace craft

#endif
