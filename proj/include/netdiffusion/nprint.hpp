#ifndef NETDIFF_NPRINT_HPP
#define NETDIFF_NPRINT_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netdiffusion/packet.hpp"

namespace netdiff {

// Tri-valued bit: 1 = set, 0 = unset, -1 = vacant.
using Trit = int8_t;

// Fixed column layout. Each protocol owns a region sized for its maximum
// header; bytes map MSB-first. 480 + 480 + 64 + 64 = 1088 columns.
namespace layout {
struct Region {
  int offset;
  int bits;
};
constexpr Region kIpv4{0, 480};    // up to 60 header bytes
constexpr Region kTcp{480, 480};   // up to 60 header bytes
constexpr Region kUdp{960, 64};    // 8 header bytes
constexpr Region kIcmp{1024, 64};  // 8 header bytes
constexpr int kRowBits = 1088;
constexpr int kMaxRows = 1024;

Region transport_region(Transport t);
}  // namespace layout

using BitRow = std::array<Trit, layout::kRowBits>;

// 1024 x 1088 tri-valued matrix; rows [n_real, 1024) are all-vacant padding.
class NprintMatrix {
 public:
  NprintMatrix()
      : trits_(size_t(layout::kMaxRows) * layout::kRowBits, Trit{-1}) {}

  std::span<Trit> row(int r) {
    return {trits_.data() + size_t(r) * layout::kRowBits, layout::kRowBits};
  }
  std::span<const Trit> row(int r) const {
    return {trits_.data() + size_t(r) * layout::kRowBits, layout::kRowBits};
  }
  Trit at(int r, int c) const {
    return trits_[size_t(r) * layout::kRowBits + c];
  }
  void set(int r, int c, Trit v) {
    trits_[size_t(r) * layout::kRowBits + c] = v;
  }

  int n_real = 0;
  std::string label;

  bool operator==(const NprintMatrix&) const = default;

 private:
  std::vector<Trit> trits_;
};

// Packs the first `bits` trits (all 0/1) of a region into bytes, MSB-first.
std::vector<uint8_t> pack_bits(std::span<const Trit> trits, int bits);
// Spreads bytes over trits, MSB-first.
void unpack_bytes(std::span<const uint8_t> bytes, std::span<Trit> trits);

// Length of the leading contiguous non-vacant run of a region.
int populated_prefix(std::span<const Trit> row, layout::Region reg);
// True if any column in the region is non-vacant.
bool region_populated(std::span<const Trit> row, layout::Region reg);

BitRow encode_packet(const Packet& p);  // throws DataError for OTHER transport
// Strict inverse on header bits; timestamps are not represented.
// Throws DecodeError carrying the violation list for malformed rows.
Packet decode_packet(std::span<const Trit> row);

NprintMatrix encode_flow(const FlowTrace& f);  // truncates at 1024 packets
FlowTrace decode_flow(const NprintMatrix& m);  // timestamps set to 0

}  // namespace netdiff

#endif
