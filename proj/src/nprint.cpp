#include "netdiffusion/nprint.hpp"

#include <sstream>

#include "netdiffusion/errors.hpp"
#include "netdiffusion/fields.hpp"

namespace netdiff {

namespace layout {
Region transport_region(Transport t) {
  switch (t) {
    case Transport::kTcp: return kTcp;
    case Transport::kUdp: return kUdp;
    case Transport::kIcmp: return kIcmp;
    default: throw DataError("OTHER transport has no column region");
  }
}
}  // namespace layout

std::vector<uint8_t> pack_bits(std::span<const Trit> trits, int bits) {
  std::vector<uint8_t> bytes(bits / 8, 0);
  for (int i = 0; i < bits; ++i) {
    if (trits[i] == 1) bytes[i / 8] |= uint8_t(0x80 >> (i % 8));
  }
  return bytes;
}

void unpack_bytes(std::span<const uint8_t> bytes, std::span<Trit> trits) {
  for (size_t i = 0; i < bytes.size() * 8; ++i) {
    trits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1 ? Trit{1} : Trit{0};
  }
}

int populated_prefix(std::span<const Trit> row, layout::Region reg) {
  int n = 0;
  while (n < reg.bits && row[reg.offset + n] != -1) ++n;
  return n;
}

bool region_populated(std::span<const Trit> row, layout::Region reg) {
  for (int i = 0; i < reg.bits; ++i) {
    if (row[reg.offset + i] != -1) return true;
  }
  return false;
}

BitRow encode_packet(const Packet& p) {
  if (p.transport == Transport::kOther) {
    throw DataError("cannot encode packet with unknown transport protocol");
  }
  if (auto err = packet_invariant_error(p)) {
    throw DataError("cannot encode packet: " + *err);
  }
  BitRow row;
  row.fill(Trit{-1});
  std::span<Trit> all(row);
  unpack_bytes(p.ip_header, all.subspan(layout::kIpv4.offset));
  layout::Region reg = layout::transport_region(p.transport);
  unpack_bytes(p.transport_header, all.subspan(reg.offset));
  return row;
}

namespace {

void check_region_shape(std::span<const Trit> row, layout::Region reg,
                        const char* name, std::vector<Violation>& out) {
  int prefix = populated_prefix(row, reg);
  for (int i = prefix; i < reg.bits; ++i) {
    if (row[reg.offset + i] != -1) {
      out.push_back({-1, name, "codec.contiguous",
                     std::string(name) + " region populated past a vacant bit"});
      return;
    }
  }
  if (prefix % 8 != 0) {
    out.push_back({-1, name, "codec.byte_aligned",
                   std::string(name) + " populated prefix is not whole bytes"});
  }
}

}  // namespace

Packet decode_packet(std::span<const Trit> row) {
  std::vector<Violation> v;

  bool any = false;
  for (Trit t : row) {
    if (t != -1) { any = true; break; }
  }
  if (!any) throw DecodeError("padding row", {{-1, "", "codec.padding", "padding row"}});

  struct Cand {
    Transport t;
    layout::Region reg;
    const char* name;
  };
  constexpr Cand kCands[] = {{Transport::kTcp, layout::kTcp, "tcp"},
                             {Transport::kUdp, layout::kUdp, "udp"},
                             {Transport::kIcmp, layout::kIcmp, "icmp"}};
  int populated_regions = 0;
  Transport transport = Transport::kOther;
  layout::Region treg{0, 0};
  std::string names;
  for (const Cand& c : kCands) {
    if (region_populated(row, c.reg)) {
      ++populated_regions;
      transport = c.t;
      treg = c.reg;
      if (!names.empty()) names += "+";
      names += c.name;
    }
  }
  if (populated_regions == 0) {
    v.push_back({-1, "", "codec.no_transport", "no transport region populated"});
    throw DecodeError("no transport region populated", std::move(v));
  }
  if (populated_regions > 1) {
    v.push_back({-1, names, "codec.region_exclusive",
                 "multiple transport regions populated: " + names});
    throw DecodeError("multiple transport regions populated", std::move(v));
  }

  check_region_shape(row, layout::kIpv4, "ipv4", v);
  const char* tname = transport == Transport::kTcp   ? "tcp"
                      : transport == Transport::kUdp ? "udp"
                                                     : "icmp";
  check_region_shape(row, treg, tname, v);
  if (!v.empty()) throw DecodeError("malformed row", std::move(v));

  int ip_bits = populated_prefix(row, layout::kIpv4);
  int t_bits = populated_prefix(row, treg);
  if (ip_bits < 160) {
    v.push_back({-1, "ipv4", "codec.min_header", "IPv4 prefix shorter than 20 bytes"});
    throw DecodeError("IPv4 prefix shorter than 20 bytes", std::move(v));
  }

  Packet p;
  p.transport = transport;
  p.ip_header = pack_bits(row.subspan(layout::kIpv4.offset), ip_bits);
  p.transport_header = pack_bits(row.subspan(treg.offset), t_bits);

  if (ipv4::version(p.ip_header) != 4) {
    v.push_back({-1, "ipv4.version", "intra.version", "version field is not 4"});
  }
  if (ipv4::header_len(p.ip_header) != p.ip_header.size()) {
    v.push_back({-1, "ipv4.ihl", "intra.ihl",
                 "IHL disagrees with populated prefix length"});
  }
  if (transport_from_protocol(ipv4::protocol(p.ip_header)) != transport) {
    v.push_back({-1, "ipv4.protocol", "intra.protocol",
                 "protocol field disagrees with populated transport region"});
  }
  switch (transport) {
    case Transport::kTcp:
      if (p.transport_header.size() < 20 ||
          tcp::header_len(p.transport_header) != p.transport_header.size()) {
        v.push_back({-1, "tcp.data_offset", "intra.data_offset",
                     "data offset disagrees with populated prefix length"});
      }
      break;
    case Transport::kUdp:
    case Transport::kIcmp:
      if (p.transport_header.size() != 8) {
        v.push_back({-1, tname, "codec.min_header",
                     "UDP/ICMP prefix must be exactly 8 bytes"});
      }
      break;
    default:
      break;
  }
  int64_t total = ipv4::total_length(p.ip_header);
  int64_t headers = int64_t(p.ip_header.size()) + int64_t(p.transport_header.size());
  if (total < headers) {
    v.push_back({-1, "ipv4.total_length", "intra.total_length",
                 "total length smaller than populated headers"});
  }
  if (transport == Transport::kUdp && v.empty() &&
      udp::length(p.transport_header) != total - int64_t(p.ip_header.size())) {
    v.push_back({-1, "udp.length", "intra.udp_length",
                 "UDP length disagrees with IPv4 total length"});
  }
  if (!v.empty()) throw DecodeError("inconsistent header fields", std::move(v));

  p.payload_len = static_cast<uint32_t>(total - headers);
  return p;
}

NprintMatrix encode_flow(const FlowTrace& f) {
  if (f.packets.empty()) throw DataError("cannot encode an empty flow");
  NprintMatrix m;
  m.label = f.label;
  m.n_real = static_cast<int>(
      std::min<size_t>(f.packets.size(), layout::kMaxRows));
  for (int i = 0; i < m.n_real; ++i) {
    BitRow row = encode_packet(f.packets[i]);
    std::copy(row.begin(), row.end(), m.row(i).begin());
  }
  return m;
}

FlowTrace decode_flow(const NprintMatrix& m) {
  FlowTrace f;
  f.label = m.label;
  f.packets.reserve(m.n_real);
  for (int i = 0; i < m.n_real; ++i) {
    try {
      f.packets.push_back(decode_packet(m.row(i)));
    } catch (const DecodeError& e) {
      std::ostringstream os;
      os << "row " << i << ": " << e.what();
      std::vector<Violation> vs = e.violations();
      for (Violation& viol : vs) viol.packet_index = i;
      throw DecodeError(os.str(), std::move(vs));
    }
  }
  if (!f.packets.empty()) f.five_tuple = tuple_of(f.packets.front());
  return f;
}

}  // namespace netdiff
