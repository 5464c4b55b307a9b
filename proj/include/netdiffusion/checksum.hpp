#ifndef NETDIFF_CHECKSUM_HPP
#define NETDIFF_CHECKSUM_HPP

#include <cstdint>
#include <span>

#include "netdiffusion/packet.hpp"

namespace netdiff {

// Ones-complement Internet checksum (RFC 1071) over a sequence of byte
// ranges. Byte position parity is tracked across parts, so split inputs
// sum exactly like the concatenated buffer.
class ChecksumAccumulator {
 public:
  void add(std::span<const uint8_t> data);
  void add_u16(uint16_t v);
  void add_u32(uint32_t v);
  // At most 65535 zero bytes contribute nothing to the sum; only parity
  // advances. Used for zero-filled payloads.
  void add_zeros(size_t n) { odd_ = (odd_ + n) & 1; }
  uint16_t finish() const;

 private:
  uint32_t sum_ = 0;
  size_t odd_ = 0;  // global byte-position parity
};

uint16_t internet_checksum(std::span<const uint8_t> data);

// IPv4 header checksum over the given header with its checksum field
// treated as zero.
uint16_t ipv4_header_checksum(std::span<const uint8_t> ip_header);

// TCP/UDP/ICMP checksum for a packet whose payload is zero-filled.
// TCP/UDP include the pseudo-header; ICMP does not. For UDP a computed
// value of zero is transmitted as 0xFFFF (RFC 768).
uint16_t transport_checksum(const Packet& p);

bool ipv4_checksum_ok(const Packet& p);
// UDP stored checksum 0 means "checksum disabled" and verifies as ok.
bool transport_checksum_ok(const Packet& p);

}  // namespace netdiff

#endif
