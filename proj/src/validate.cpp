#include <optional>

#include "netdiffusion/checksum.hpp"
#include "netdiffusion/fields.hpp"
#include "netdiffusion/repair.hpp"

namespace netdiff {

namespace {

void check_intra(const Packet& p, int i, ComplianceReport& rep) {
  auto add = [&](const char* field, const char* rule, std::string msg) {
    rep.violations.push_back({i, field, rule, std::move(msg)});
  };

  if (auto err = packet_invariant_error(p)) {
    // Pin the failure on the most specific rule we can.
    if (err->find("version") != std::string::npos) {
      add("ipv4.version", "intra.version", *err);
    } else if (err->find("IHL") != std::string::npos) {
      add("ipv4.ihl", "intra.ihl", *err);
    } else if (err->find("data offset") != std::string::npos) {
      add("tcp.data_offset", "intra.data_offset", *err);
    } else if (err->find("protocol") != std::string::npos) {
      add("ipv4.protocol", "intra.protocol", *err);
    } else if (err->find("total length") != std::string::npos) {
      add("ipv4.total_length", "intra.total_length", *err);
    } else {
      add("", "intra.min_header", *err);
    }
    return;  // further field checks would read out of shape
  }

  if ((ipv4::flags(p.ip_header) & 0x4) != 0) {
    add("ipv4.flags", "intra.fragment", "reserved flag bit set");
  }
  if (ipv4::mf(p.ip_header) || ipv4::frag_offset(p.ip_header) != 0) {
    add("ipv4.frag_offset", "intra.fragment", "fragmented datagram");
  }
  if (!ipv4_checksum_ok(p)) {
    add("ipv4.checksum", "inter.checksum", "bad IPv4 header checksum");
    ++rep.checksum_errors;
  }
  switch (p.transport) {
    case Transport::kTcp:
      if (tcp::reserved(p.transport_header) != 0) {
        add("tcp.reserved", "intra.tcp_reserved", "TCP reserved bits set");
      }
      if (!transport_checksum_ok(p)) {
        add("tcp.checksum", "inter.checksum", "bad TCP checksum");
        ++rep.checksum_errors;
      }
      break;
    case Transport::kUdp:
      if (udp::length(p.transport_header) != 8 + p.payload_len) {
        add("udp.length", "intra.udp_length",
            "UDP length disagrees with payload length");
      }
      if (!transport_checksum_ok(p)) {
        add("udp.checksum", "inter.checksum", "bad UDP checksum");
        ++rep.checksum_errors;
      }
      break;
    case Transport::kIcmp:
      if (!transport_checksum_ok(p)) {
        add("icmp.checksum", "inter.checksum", "bad ICMP checksum");
        ++rep.checksum_errors;
      }
      break;
    default:
      break;
  }
}

}  // namespace

ComplianceReport validate(const FlowTrace& f) {
  ComplianceReport rep;
  rep.n_packets = static_cast<int>(f.packets.size());
  if (f.packets.empty()) return rep;

  FiveTuple tuple = f.five_tuple;
  if (tuple == FiveTuple{}) tuple = tuple_of(f.packets.front());

  bool all_tcp = true;
  for (size_t i = 0; i < f.packets.size(); ++i) {
    const Packet& p = f.packets[i];
    check_intra(p, static_cast<int>(i), rep);
    if (p.transport != Transport::kTcp) all_tcp = false;

    FiveTuple t = tuple_of(p);
    if (!(t == tuple || t == tuple.reversed())) {
      rep.violations.push_back({static_cast<int>(i), "ipv4.src_addr",
                                "inter.tuple_uniform",
                                "packet does not match the flow 5-tuple"});
    }
    if (i > 0 && p.timestamp_us < f.packets[i - 1].timestamp_us) {
      rep.violations.push_back({static_cast<int>(i), "timestamp",
                                "inter.time_order",
                                "timestamps not non-decreasing"});
    }
  }

  if (!all_tcp) return rep;

  // Handshake ordering: if any SYN exists the flow must open with
  // SYN / SYN-ACK / ACK and carry no SYN elsewhere.
  bool any_syn = false;
  for (const Packet& p : f.packets) {
    if (tcp::flags(p.transport_header) & tcp::kSyn) any_syn = true;
  }
  if (any_syn) {
    auto hs_fail = [&](int i, std::string msg) {
      rep.violations.push_back(
          {i, "tcp.flags", "inter.handshake", std::move(msg)});
    };
    if (f.packets.size() < 3) {
      hs_fail(0, "SYN present but flow shorter than a handshake");
    } else {
      uint8_t f0 = tcp::flags(f.packets[0].transport_header);
      uint8_t f1 = tcp::flags(f.packets[1].transport_header);
      uint8_t f2 = tcp::flags(f.packets[2].transport_header);
      if ((f0 & (tcp::kSyn | tcp::kAck)) != tcp::kSyn) {
        hs_fail(0, "first packet is not a plain SYN");
      }
      if ((f1 & (tcp::kSyn | tcp::kAck)) != (tcp::kSyn | tcp::kAck)) {
        hs_fail(1, "second packet is not a SYN-ACK");
      }
      if (tuple_of(f.packets[1]) == tuple_of(f.packets[0])) {
        hs_fail(1, "SYN-ACK flows in the same direction as the SYN");
      }
      if ((f2 & (tcp::kSyn | tcp::kAck)) != tcp::kAck) {
        hs_fail(2, "third packet is not a plain ACK");
      }
      for (size_t i = 2; i < f.packets.size(); ++i) {
        if (tcp::flags(f.packets[i].transport_header) & tcp::kSyn) {
          hs_fail(static_cast<int>(i), "SYN after the handshake");
        }
      }
    }
  }

  // Sequence/acknowledgment walk. Mid-stream flows initialize each
  // direction from its first observed packet.
  std::optional<uint32_t> next[2];
  for (size_t i = 0; i < f.packets.size(); ++i) {
    const Packet& p = f.packets[i];
    int d = tuple_of(p) == tuple ? 0 : 1;
    uint8_t flags = tcp::flags(p.transport_header);
    uint32_t consume = p.payload_len + ((flags & tcp::kSyn) ? 1 : 0) +
                       ((flags & tcp::kFin) ? 1 : 0);
    uint32_t seq = tcp::seq(p.transport_header);
    if (next[d] && seq != *next[d]) {
      rep.violations.push_back({static_cast<int>(i), "tcp.seq",
                                "inter.seq_chain",
                                "sequence number breaks the chain"});
    }
    next[d] = seq + consume;
    if (flags & tcp::kAck) {
      uint32_t ack = tcp::ack(p.transport_header);
      if (next[1 - d]) {
        if (ack != *next[1 - d]) {
          rep.violations.push_back({static_cast<int>(i), "tcp.ack",
                                    "inter.ack_chain",
                                    "acknowledgment does not match the peer's "
                                    "next sequence number"});
        }
      } else {
        next[1 - d] = ack;
      }
    }
  }
  return rep;
}

}  // namespace netdiff
