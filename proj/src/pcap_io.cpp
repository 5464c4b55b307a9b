#include "netdiffusion/pcap_io.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "netdiffusion/errors.hpp"
#include "netdiffusion/fields.hpp"

namespace netdiff {

namespace {

constexpr uint32_t kMagicUsec = 0xa1b2c3d4;
constexpr uint32_t kMagicUsecSwapped = 0xd4c3b2a1;
constexpr uint32_t kMagicNsec = 0xa1b23c4d;
constexpr uint32_t kMagicNsecSwapped = 0x4d3cb2a1;
constexpr uint32_t kLinktypeRaw = 101;
constexpr uint32_t kLinktypeRawip4 = 129;  // platform alias seen in the wild
constexpr uint32_t kSnaplen = 65535;

#pragma pack(push, 1)
struct GlobalHeader {
  uint32_t magic;
  uint16_t version_major;
  uint16_t version_minor;
  int32_t thiszone;
  uint32_t sigfigs;
  uint32_t snaplen;
  uint32_t network;
};
struct RecordHeader {
  uint32_t ts_sec;
  uint32_t ts_usec;
  uint32_t incl_len;
  uint32_t orig_len;
};
#pragma pack(pop)

uint32_t bswap32(uint32_t v) { return __builtin_bswap32(v); }
uint16_t bswap16(uint16_t v) { return __builtin_bswap16(v); }

[[noreturn]] void record_error(size_t index, const std::string& what) {
  std::ostringstream os;
  os << "pcap record " << index << ": " << what;
  throw FormatError(os.str());
}

// Parses one raw-IP record into a Packet. `data` holds the captured
// bytes; headers must be fully captured, payload bytes may be cut short.
Packet parse_record(std::span<const uint8_t> data, size_t index) {
  if (data.size() < 20) record_error(index, "captured bytes shorter than an IPv4 header");
  if (ipv4::version(data) != 4) record_error(index, "not an IPv4 packet");
  size_t ip_len = ipv4::header_len(data);
  if (ip_len < 20 || ip_len > 60) record_error(index, "bad IHL");
  if (data.size() < ip_len) record_error(index, "IPv4 options truncated");
  if (ipv4::mf(data) || ipv4::frag_offset(data) != 0) {
    record_error(index, "fragmented datagram (reassembly unsupported)");
  }
  uint32_t total = ipv4::total_length(data);
  if (total < ip_len) record_error(index, "total length smaller than IHL");

  Packet p;
  p.transport = transport_from_protocol(ipv4::protocol(data));
  p.ip_header.assign(data.begin(), data.begin() + ip_len);

  std::span<const uint8_t> rest = data.subspan(ip_len);
  size_t th_len = 0;
  switch (p.transport) {
    case Transport::kTcp: {
      if (rest.size() < 20) record_error(index, "TCP header truncated");
      th_len = tcp::header_len(rest);
      if (th_len < 20 || th_len > 60) record_error(index, "bad TCP data offset");
      if (rest.size() < th_len) record_error(index, "TCP options truncated");
      break;
    }
    case Transport::kUdp: {
      if (rest.size() < 8) record_error(index, "UDP header truncated");
      th_len = 8;
      if (udp::length(rest) != total - ip_len) {
        record_error(index, "UDP length disagrees with IPv4 total length");
      }
      break;
    }
    case Transport::kIcmp: {
      if (rest.size() < 8) record_error(index, "ICMP header truncated");
      th_len = 8;
      break;
    }
    case Transport::kOther:
      th_len = 0;
      break;
  }
  if (total < ip_len + th_len) record_error(index, "total length smaller than headers");
  p.transport_header.assign(rest.begin(), rest.begin() + th_len);
  p.payload_len = static_cast<uint32_t>(total - ip_len - th_len);
  return p;
}

}  // namespace

std::optional<std::string> packet_invariant_error(const Packet& p) {
  if (p.ip_header.size() < 20 || p.ip_header.size() > 60) {
    return "IPv4 header length out of range";
  }
  if (ipv4::version(p.ip_header) != 4) return "IPv4 version field is not 4";
  if (ipv4::header_len(p.ip_header) != p.ip_header.size()) {
    return "IHL disagrees with header byte count";
  }
  if (transport_from_protocol(ipv4::protocol(p.ip_header)) != p.transport) {
    return "protocol field disagrees with transport kind";
  }
  switch (p.transport) {
    case Transport::kTcp:
      if (p.transport_header.size() < 20 || p.transport_header.size() > 60 ||
          tcp::header_len(p.transport_header) != p.transport_header.size()) {
        return "TCP data offset disagrees with header byte count";
      }
      break;
    case Transport::kUdp:
    case Transport::kIcmp:
      if (p.transport_header.size() != 8) return "UDP/ICMP header must be 8 bytes";
      break;
    case Transport::kOther:
      if (!p.transport_header.empty()) return "OTHER transport carries header bytes";
      break;
  }
  if (ipv4::total_length(p.ip_header) != p.total_length()) {
    return "IPv4 total length disagrees with header + payload lengths";
  }
  return std::nullopt;
}

FiveTuple tuple_of(const Packet& p) {
  FiveTuple t;
  t.src_ip = ipv4::src_addr(p.ip_header);
  t.dst_ip = ipv4::dst_addr(p.ip_header);
  t.protocol = ipv4::protocol(p.ip_header);
  if (p.transport == Transport::kTcp || p.transport == Transport::kUdp) {
    t.src_port = get_be16(p.transport_header, 0);
    t.dst_port = get_be16(p.transport_header, 2);
  }
  return t;
}

std::string ip_to_string(uint32_t ip) {
  std::ostringstream os;
  os << ((ip >> 24) & 0xff) << '.' << ((ip >> 16) & 0xff) << '.'
     << ((ip >> 8) & 0xff) << '.' << (ip & 0xff);
  return os.str();
}

uint32_t ip_from_string(const std::string& dotted) {
  uint32_t parts[4];
  char dot;
  std::istringstream is(dotted);
  for (int i = 0; i < 4; ++i) {
    if (!(is >> parts[i]) || parts[i] > 255) {
      throw DataError("bad IPv4 address: " + dotted);
    }
    if (i < 3 && (!(is >> dot) || dot != '.')) {
      throw DataError("bad IPv4 address: " + dotted);
    }
  }
  return (parts[0] << 24) | (parts[1] << 16) | (parts[2] << 8) | parts[3];
}

std::vector<Packet> read_pcap(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  GlobalHeader gh;
  if (!in.read(reinterpret_cast<char*>(&gh), sizeof gh)) {
    throw FormatError("file too short for a pcap global header");
  }
  bool swapped = false;
  if (gh.magic == kMagicUsec) {
    swapped = false;
  } else if (gh.magic == kMagicUsecSwapped) {
    swapped = true;
  } else if (gh.magic == kMagicNsec || gh.magic == kMagicNsecSwapped) {
    throw FormatError("nanosecond pcap is not supported (microsecond precision required)");
  } else {
    throw FormatError("not a pcap file (unrecognized magic)");
  }
  uint32_t network = swapped ? bswap32(gh.network) : gh.network;
  if (network != kLinktypeRaw && network != kLinktypeRawip4) {
    throw FormatError("unsupported link type " + std::to_string(network) +
                      " (raw IP required)");
  }

  std::vector<Packet> packets;
  std::vector<uint8_t> buf;
  for (size_t index = 0;; ++index) {
    RecordHeader rh;
    in.read(reinterpret_cast<char*>(&rh), sizeof rh);
    if (in.gcount() == 0) break;
    if (in.gcount() != static_cast<std::streamsize>(sizeof rh)) {
      record_error(index, "truncated record header");
    }
    if (swapped) {
      rh.ts_sec = bswap32(rh.ts_sec);
      rh.ts_usec = bswap32(rh.ts_usec);
      rh.incl_len = bswap32(rh.incl_len);
      rh.orig_len = bswap32(rh.orig_len);
    }
    if (rh.incl_len > (1u << 26)) record_error(index, "implausible captured length");
    buf.resize(rh.incl_len);
    in.read(reinterpret_cast<char*>(buf.data()), rh.incl_len);
    if (in.gcount() != static_cast<std::streamsize>(rh.incl_len)) {
      record_error(index, "truncated record body");
    }
    Packet p = parse_record(buf, index);
    p.timestamp_us = int64_t(rh.ts_sec) * 1000000 + rh.ts_usec;
    packets.push_back(std::move(p));
  }
  if (!packets.empty()) {
    int64_t t0 = packets.front().timestamp_us;
    for (Packet& p : packets) p.timestamp_us -= t0;
  }
  return packets;
}

void write_pcap(std::span<const Packet> packets,
                const std::filesystem::path& path) {
  for (size_t i = 0; i < packets.size(); ++i) {
    if (auto err = packet_invariant_error(packets[i])) {
      throw DataError("packet " + std::to_string(i) + ": " + *err);
    }
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");

    GlobalHeader gh{kMagicUsec, 2, 4, 0, 0, kSnaplen, kLinktypeRaw};
    out.write(reinterpret_cast<const char*>(&gh), sizeof gh);

    std::vector<uint8_t> zeros;
    for (const Packet& p : packets) {
      RecordHeader rh;
      rh.ts_sec = static_cast<uint32_t>(p.timestamp_us / 1000000);
      rh.ts_usec = static_cast<uint32_t>(p.timestamp_us % 1000000);
      rh.incl_len = p.total_length();
      rh.orig_len = p.total_length();
      out.write(reinterpret_cast<const char*>(&rh), sizeof rh);
      out.write(reinterpret_cast<const char*>(p.ip_header.data()),
                p.ip_header.size());
      out.write(reinterpret_cast<const char*>(p.transport_header.data()),
                p.transport_header.size());
      if (p.payload_len > 0) {
        zeros.assign(p.payload_len, 0);
        out.write(reinterpret_cast<const char*>(zeros.data()), zeros.size());
      }
    }
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename to " + path.string() + " failed: " + ec.message());
}

std::vector<FlowTrace> split_flows(std::span<const Packet> packets) {
  std::map<std::tuple<uint64_t, uint64_t, uint8_t>, size_t> index;
  std::vector<FlowTrace> flows;
  for (const Packet& p : packets) {
    FiveTuple t = tuple_of(p);
    auto key = t.unordered_key();
    auto [it, inserted] = index.try_emplace(key, flows.size());
    if (inserted) {
      FlowTrace f;
      f.five_tuple = t;
      flows.push_back(std::move(f));
    }
    flows[it->second].packets.push_back(p);
  }
  std::stable_sort(flows.begin(), flows.end(),
                   [](const FlowTrace& a, const FlowTrace& b) {
                     return a.packets.front().timestamp_us <
                            b.packets.front().timestamp_us;
                   });
  return flows;
}

}  // namespace netdiff
