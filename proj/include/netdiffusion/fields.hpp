#ifndef NETDIFF_FIELDS_HPP
#define NETDIFF_FIELDS_HPP

#include <cstdint>
#include <span>

// Big-endian field access into raw IPv4/TCP/UDP/ICMP header bytes.
// All offsets follow RFC 791/793/768/792 layouts.

namespace netdiff {

inline uint16_t get_be16(std::span<const uint8_t> b, size_t off) {
  return static_cast<uint16_t>((b[off] << 8) | b[off + 1]);
}

inline uint32_t get_be32(std::span<const uint8_t> b, size_t off) {
  return (static_cast<uint32_t>(b[off]) << 24) |
         (static_cast<uint32_t>(b[off + 1]) << 16) |
         (static_cast<uint32_t>(b[off + 2]) << 8) |
         static_cast<uint32_t>(b[off + 3]);
}

inline void set_be16(std::span<uint8_t> b, size_t off, uint16_t v) {
  b[off] = static_cast<uint8_t>(v >> 8);
  b[off + 1] = static_cast<uint8_t>(v & 0xff);
}

inline void set_be32(std::span<uint8_t> b, size_t off, uint32_t v) {
  b[off] = static_cast<uint8_t>(v >> 24);
  b[off + 1] = static_cast<uint8_t>((v >> 16) & 0xff);
  b[off + 2] = static_cast<uint8_t>((v >> 8) & 0xff);
  b[off + 3] = static_cast<uint8_t>(v & 0xff);
}

namespace ipv4 {

inline uint8_t version(std::span<const uint8_t> h) { return h[0] >> 4; }
inline uint8_t ihl(std::span<const uint8_t> h) { return h[0] & 0x0f; }
inline size_t header_len(std::span<const uint8_t> h) { return size_t(ihl(h)) * 4; }
inline uint8_t tos(std::span<const uint8_t> h) { return h[1]; }
inline uint16_t total_length(std::span<const uint8_t> h) { return get_be16(h, 2); }
inline uint16_t ident(std::span<const uint8_t> h) { return get_be16(h, 4); }
// 3-bit flags field: reserved / DF / MF.
inline uint8_t flags(std::span<const uint8_t> h) { return h[6] >> 5; }
inline bool df(std::span<const uint8_t> h) { return (h[6] & 0x40) != 0; }
inline bool mf(std::span<const uint8_t> h) { return (h[6] & 0x20) != 0; }
inline uint16_t frag_offset(std::span<const uint8_t> h) { return get_be16(h, 6) & 0x1fff; }
inline uint8_t ttl(std::span<const uint8_t> h) { return h[8]; }
inline uint8_t protocol(std::span<const uint8_t> h) { return h[9]; }
inline uint16_t checksum(std::span<const uint8_t> h) { return get_be16(h, 10); }
inline uint32_t src_addr(std::span<const uint8_t> h) { return get_be32(h, 12); }
inline uint32_t dst_addr(std::span<const uint8_t> h) { return get_be32(h, 16); }

inline void set_version_ihl(std::span<uint8_t> h, uint8_t ver, uint8_t ihl_words) {
  h[0] = static_cast<uint8_t>((ver << 4) | (ihl_words & 0x0f));
}
inline void set_total_length(std::span<uint8_t> h, uint16_t v) { set_be16(h, 2, v); }
inline void set_ident(std::span<uint8_t> h, uint16_t v) { set_be16(h, 4, v); }
inline void set_flags_frag(std::span<uint8_t> h, bool df_bit, uint16_t frag13) {
  uint16_t v = static_cast<uint16_t>((df_bit ? 0x4000 : 0) | (frag13 & 0x1fff));
  set_be16(h, 6, v);
}
inline void set_ttl(std::span<uint8_t> h, uint8_t v) { h[8] = v; }
inline void set_protocol(std::span<uint8_t> h, uint8_t v) { h[9] = v; }
inline void set_checksum(std::span<uint8_t> h, uint16_t v) { set_be16(h, 10, v); }
inline void set_src_addr(std::span<uint8_t> h, uint32_t v) { set_be32(h, 12, v); }
inline void set_dst_addr(std::span<uint8_t> h, uint32_t v) { set_be32(h, 16, v); }

}  // namespace ipv4

namespace tcp {

constexpr uint8_t kFin = 0x01;
constexpr uint8_t kSyn = 0x02;
constexpr uint8_t kRst = 0x04;
constexpr uint8_t kPsh = 0x08;
constexpr uint8_t kAck = 0x10;
constexpr uint8_t kUrg = 0x20;

inline uint16_t src_port(std::span<const uint8_t> h) { return get_be16(h, 0); }
inline uint16_t dst_port(std::span<const uint8_t> h) { return get_be16(h, 2); }
inline uint32_t seq(std::span<const uint8_t> h) { return get_be32(h, 4); }
inline uint32_t ack(std::span<const uint8_t> h) { return get_be32(h, 8); }
inline uint8_t data_offset(std::span<const uint8_t> h) { return h[12] >> 4; }
inline size_t header_len(std::span<const uint8_t> h) { return size_t(data_offset(h)) * 4; }
inline uint8_t reserved(std::span<const uint8_t> h) { return h[12] & 0x0f; }
inline uint8_t flags(std::span<const uint8_t> h) { return h[13]; }
inline uint16_t window(std::span<const uint8_t> h) { return get_be16(h, 14); }
inline uint16_t checksum(std::span<const uint8_t> h) { return get_be16(h, 16); }
inline uint16_t urgent_ptr(std::span<const uint8_t> h) { return get_be16(h, 18); }

inline void set_src_port(std::span<uint8_t> h, uint16_t v) { set_be16(h, 0, v); }
inline void set_dst_port(std::span<uint8_t> h, uint16_t v) { set_be16(h, 2, v); }
inline void set_seq(std::span<uint8_t> h, uint32_t v) { set_be32(h, 4, v); }
inline void set_ack(std::span<uint8_t> h, uint32_t v) { set_be32(h, 8, v); }
inline void set_data_offset(std::span<uint8_t> h, uint8_t words) {
  h[12] = static_cast<uint8_t>((words << 4) | (h[12] & 0x0f));
}
inline void clear_reserved(std::span<uint8_t> h) { h[12] &= 0xf0; }
inline void set_flags(std::span<uint8_t> h, uint8_t v) { h[13] = v; }
inline void set_window(std::span<uint8_t> h, uint16_t v) { set_be16(h, 14, v); }
inline void set_checksum(std::span<uint8_t> h, uint16_t v) { set_be16(h, 16, v); }
inline void set_urgent_ptr(std::span<uint8_t> h, uint16_t v) { set_be16(h, 18, v); }

}  // namespace tcp

namespace udp {

inline uint16_t src_port(std::span<const uint8_t> h) { return get_be16(h, 0); }
inline uint16_t dst_port(std::span<const uint8_t> h) { return get_be16(h, 2); }
inline uint16_t length(std::span<const uint8_t> h) { return get_be16(h, 4); }
inline uint16_t checksum(std::span<const uint8_t> h) { return get_be16(h, 6); }

inline void set_src_port(std::span<uint8_t> h, uint16_t v) { set_be16(h, 0, v); }
inline void set_dst_port(std::span<uint8_t> h, uint16_t v) { set_be16(h, 2, v); }
inline void set_length(std::span<uint8_t> h, uint16_t v) { set_be16(h, 4, v); }
inline void set_checksum(std::span<uint8_t> h, uint16_t v) { set_be16(h, 6, v); }

}  // namespace udp

namespace icmp {

inline uint8_t type(std::span<const uint8_t> h) { return h[0]; }
inline uint8_t code(std::span<const uint8_t> h) { return h[1]; }
inline uint16_t checksum(std::span<const uint8_t> h) { return get_be16(h, 2); }

inline void set_type(std::span<uint8_t> h, uint8_t v) { h[0] = v; }
inline void set_code(std::span<uint8_t> h, uint8_t v) { h[1] = v; }
inline void set_checksum(std::span<uint8_t> h, uint16_t v) { set_be16(h, 2, v); }

}  // namespace icmp

}  // namespace netdiff

#endif
