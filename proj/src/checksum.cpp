#include "netdiffusion/checksum.hpp"

#include "netdiffusion/fields.hpp"

namespace netdiff {

void ChecksumAccumulator::add(std::span<const uint8_t> data) {
  for (uint8_t b : data) {
    if ((odd_ & 1) == 0) {
      sum_ += static_cast<uint32_t>(b) << 8;
    } else {
      sum_ += b;
    }
    // Fold early enough that sum_ cannot overflow 32 bits.
    if (sum_ > 0x7fffffff) sum_ = (sum_ & 0xffff) + (sum_ >> 16);
    ++odd_;
  }
}

void ChecksumAccumulator::add_u16(uint16_t v) {
  const uint8_t b[2] = {static_cast<uint8_t>(v >> 8),
                        static_cast<uint8_t>(v & 0xff)};
  add(b);
}

void ChecksumAccumulator::add_u32(uint32_t v) {
  add_u16(static_cast<uint16_t>(v >> 16));
  add_u16(static_cast<uint16_t>(v & 0xffff));
}

uint16_t ChecksumAccumulator::finish() const {
  uint32_t s = sum_;
  while (s >> 16) s = (s & 0xffff) + (s >> 16);
  return static_cast<uint16_t>(~s & 0xffff);
}

uint16_t internet_checksum(std::span<const uint8_t> data) {
  ChecksumAccumulator acc;
  acc.add(data);
  return acc.finish();
}

uint16_t ipv4_header_checksum(std::span<const uint8_t> ip_header) {
  ChecksumAccumulator acc;
  acc.add(ip_header.subspan(0, 10));
  acc.add_u16(0);  // checksum field
  acc.add(ip_header.subspan(12));
  return acc.finish();
}

uint16_t transport_checksum(const Packet& p) {
  ChecksumAccumulator acc;
  const auto& th = p.transport_header;
  switch (p.transport) {
    case Transport::kTcp: {
      acc.add_u32(ipv4::src_addr(p.ip_header));
      acc.add_u32(ipv4::dst_addr(p.ip_header));
      acc.add_u16(6);
      acc.add_u16(static_cast<uint16_t>(th.size() + p.payload_len));
      acc.add(std::span<const uint8_t>(th).subspan(0, 16));
      acc.add_u16(0);  // checksum field
      acc.add(std::span<const uint8_t>(th).subspan(18));
      acc.add_zeros(p.payload_len);
      return acc.finish();
    }
    case Transport::kUdp: {
      acc.add_u32(ipv4::src_addr(p.ip_header));
      acc.add_u32(ipv4::dst_addr(p.ip_header));
      acc.add_u16(17);
      acc.add_u16(static_cast<uint16_t>(th.size() + p.payload_len));
      acc.add(std::span<const uint8_t>(th).subspan(0, 6));
      acc.add_u16(0);
      acc.add_zeros(p.payload_len);
      uint16_t v = acc.finish();
      return v == 0 ? 0xffff : v;
    }
    case Transport::kIcmp: {
      acc.add(std::span<const uint8_t>(th).subspan(0, 2));
      acc.add_u16(0);
      acc.add(std::span<const uint8_t>(th).subspan(4));
      acc.add_zeros(p.payload_len);
      return acc.finish();
    }
    default:
      return 0;
  }
}

bool ipv4_checksum_ok(const Packet& p) {
  return ipv4::checksum(p.ip_header) == ipv4_header_checksum(p.ip_header);
}

bool transport_checksum_ok(const Packet& p) {
  switch (p.transport) {
    case Transport::kTcp:
      return tcp::checksum(p.transport_header) == transport_checksum(p);
    case Transport::kUdp: {
      uint16_t stored = udp::checksum(p.transport_header);
      return stored == 0 || stored == transport_checksum(p);
    }
    case Transport::kIcmp:
      return icmp::checksum(p.transport_header) == transport_checksum(p);
    default:
      return true;
  }
}

}  // namespace netdiff
