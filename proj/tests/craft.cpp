#include "craft.hpp"

#include <algorithm>
#include <cassert>

#include "netdiffusion/checksum.hpp"
#include "netdiffusion/fields.hpp"

namespace craft {

using namespace netdiff;

namespace {

std::vector<uint8_t> pad4(std::vector<uint8_t> opts) {
  while (opts.size() % 4 != 0) opts.push_back(0x01);  // NOP padding
  return opts;
}

std::vector<uint8_t> ip_header(uint32_t src, uint32_t dst, uint8_t proto,
                               uint16_t total, uint8_t ttl, uint16_t ident,
                               uint8_t tos, std::span<const uint8_t> options) {
  std::vector<uint8_t> h(20 + options.size(), 0);
  ipv4::set_version_ihl(h, 4, static_cast<uint8_t>(h.size() / 4));
  h[1] = tos;
  ipv4::set_total_length(h, total);
  ipv4::set_ident(h, ident);
  ipv4::set_flags_frag(h, true, 0);  // DF set, no fragmentation
  ipv4::set_ttl(h, ttl);
  ipv4::set_protocol(h, proto);
  ipv4::set_src_addr(h, src);
  ipv4::set_dst_addr(h, dst);
  std::copy(options.begin(), options.end(), h.begin() + 20);
  ipv4::set_checksum(h, ipv4_header_checksum(h));
  return h;
}

}  // namespace

Packet tcp_packet(const TcpArgs& a) {
  std::vector<uint8_t> tcp_opts = pad4(a.tcp_options);
  std::vector<uint8_t> ip_opts = pad4(a.ip_options);

  Packet p;
  p.timestamp_us = a.timestamp_us;
  p.transport = Transport::kTcp;
  p.payload_len = a.payload_len;

  std::vector<uint8_t>& th = p.transport_header;
  th.assign(20 + tcp_opts.size(), 0);
  tcp::set_src_port(th, a.src_port);
  tcp::set_dst_port(th, a.dst_port);
  tcp::set_seq(th, a.seq);
  tcp::set_ack(th, a.ack);
  tcp::set_data_offset(th, static_cast<uint8_t>(th.size() / 4));
  tcp::set_flags(th, a.flags);
  tcp::set_window(th, a.window);
  tcp::set_urgent_ptr(th, a.urgent_ptr);
  std::copy(tcp_opts.begin(), tcp_opts.end(), th.begin() + 20);

  uint16_t total = static_cast<uint16_t>(20 + ip_opts.size() + th.size() +
                                         a.payload_len);
  p.ip_header = ip_header(a.src_ip, a.dst_ip, 6, total, a.ttl, a.ident, a.tos,
                          ip_opts);
  tcp::set_checksum(th, transport_checksum(p));
  return p;
}

Packet udp_packet(const UdpArgs& a) {
  Packet p;
  p.timestamp_us = a.timestamp_us;
  p.transport = Transport::kUdp;
  p.payload_len = a.payload_len;
  std::vector<uint8_t>& th = p.transport_header;
  th.assign(8, 0);
  udp::set_src_port(th, a.src_port);
  udp::set_dst_port(th, a.dst_port);
  udp::set_length(th, static_cast<uint16_t>(8 + a.payload_len));
  uint16_t total = static_cast<uint16_t>(28 + a.payload_len);
  p.ip_header = ip_header(a.src_ip, a.dst_ip, 17, total, a.ttl, a.ident, 0, {});
  udp::set_checksum(th, transport_checksum(p));
  return p;
}

Packet icmp_packet(const IcmpArgs& a) {
  Packet p;
  p.timestamp_us = a.timestamp_us;
  p.transport = Transport::kIcmp;
  p.payload_len = a.payload_len;
  std::vector<uint8_t>& th = p.transport_header;
  th.assign(8, 0);
  icmp::set_type(th, a.type);
  icmp::set_code(th, a.code);
  set_be16(th, 4, a.ident);
  set_be16(th, 6, a.seq);
  uint16_t total = static_cast<uint16_t>(28 + a.payload_len);
  p.ip_header = ip_header(a.src_ip, a.dst_ip, 1, total, a.ttl, a.ident, 0, {});
  icmp::set_checksum(th, transport_checksum(p));
  return p;
}

std::vector<Packet> reference_capture() {
  const uint32_t client_ip = ip_from_string("192.168.43.37");
  const uint32_t server_ip = ip_from_string("54.182.199.148");
  const uint16_t client_port = 46508;
  const uint16_t server_port = 443;

  std::vector<Packet> packets;
  uint32_t next_c = 1000000;  // mid-stream bases; no handshake in capture
  uint32_t next_s = 2000000;
  uint16_t ident_c = 7001;
  uint16_t ident_s = 42001;
  int64_t now = 0;
  int big_packets = 0;

  auto push = [&](bool from_client, uint32_t payload, uint8_t flags,
                  uint16_t urg_ptr) {
    size_t index = packets.size();
    if (index > 0) now += index <= 772 ? 589 : 588;
    uint16_t window = index < 52 ? 32739 : 32740;
    TcpArgs a;
    a.src_ip = from_client ? client_ip : server_ip;
    a.dst_ip = from_client ? server_ip : client_ip;
    a.src_port = from_client ? client_port : server_port;
    a.dst_port = from_client ? server_port : client_port;
    a.seq = from_client ? next_c : next_s;
    a.ack = (flags & netdiff::tcp::kAck) ? (from_client ? next_s : next_c) : 0;
    a.flags = flags;
    a.window = window;
    a.ttl = from_client ? 64 : 238;
    a.ident = from_client ? ident_c++ : ident_s++;
    a.urgent_ptr = urg_ptr;
    a.payload_len = payload;
    a.timestamp_us = now;
    packets.push_back(tcp_packet(a));
    (from_client ? next_c : next_s) += payload;
  };
  auto server_data = [&](uint32_t payload) {
    if (payload == 1460) ++big_packets;
    bool urg = payload == 1460 && big_packets <= 16;
    push(false, payload,
         urg ? uint8_t(netdiff::tcp::kAck | netdiff::tcp::kUrg)
             : netdiff::tcp::kAck,
         urg ? 1 : 0);
  };

  // First packet: flagless 40-byte client segment (the one non-ACK row).
  push(true, 0, 0, 0);
  for (int round = 0; round <= 101; ++round) {
    push(true, round < 101 ? 199 : 67, netdiff::tcp::kAck, 0);  // request
    if (round >= 99) push(false, 0, netdiff::tcp::kAck, 0);     // server ack
    int bigs = round < 100 ? 7 : (round == 100 ? 6 : 0);
    for (int b = 0; b < bigs; ++b) {
      server_data(1460);
      if (b == 3 && round < 99) push(true, 0, netdiff::tcp::kAck, 0);
    }
    if (round < 6) {
      server_data(960);
      server_data(460);
    }
    if (round < 101) push(true, 0, netdiff::tcp::kAck, 0);  // end-of-round ack
  }
  assert(packets.size() == 1024);
  return packets;
}

std::vector<FlowTrace> streaming_corpus(int n_flows, uint64_t seed) {
  // Constant 20 bytes of TCP options (NOP NOP TS(10) + 8 NOPs): every
  // packet of the class uses a 40-byte TCP header.
  const std::vector<uint8_t> kOptions = {0x01, 0x01, 0x08, 0x0a, 0x21, 0x43,
                                         0x65, 0x87, 0x10, 0x32, 0x54, 0x76,
                                         0x01, 0x01, 0x01, 0x01, 0x01, 0x01,
                                         0x01, 0x01};
  std::vector<FlowTrace> flows;
  for (int fi = 0; fi < n_flows; ++fi) {
    Rng rng(derive_seed(seed, 0xC0FFEE00 + uint64_t(fi)));
    FlowTrace flow;
    flow.label = "streaming";

    const uint32_t server_ip =
        ip_from_string("23.246.12." + std::to_string(10 + rng.below(8)));
    const uint32_t client_ip =
        ip_from_string("10.0.42." + std::to_string(100 + rng.below(40)));
    const uint16_t client_port = static_cast<uint16_t>(40000 + rng.below(2000));
    const uint16_t server_port = 443;
    flow.five_tuple = {client_ip, server_ip, client_port, server_port, 6};

    uint32_t next_c = rng.u32();
    uint32_t next_s = rng.u32();
    uint16_t ident_c = rng.u16();
    uint16_t ident_s = rng.u16();
    int64_t now = 0;

    auto push = [&](bool from_client, uint32_t payload, uint8_t flags) {
      TcpArgs a;
      a.src_ip = from_client ? client_ip : server_ip;
      a.dst_ip = from_client ? server_ip : client_ip;
      a.src_port = from_client ? client_port : server_port;
      a.dst_port = from_client ? server_port : client_port;
      a.seq = from_client ? next_c : next_s;
      a.ack = (flags & netdiff::tcp::kAck) ? (from_client ? next_s : next_c) : 0;
      a.flags = flags;
      a.window = from_client ? static_cast<uint16_t>(500 + rng.below(64))
                             : static_cast<uint16_t>(32700 + rng.below(80));
      a.ttl = from_client ? 64 : 57;
      a.ident = from_client ? ident_c++ : ident_s++;
      a.payload_len = payload;
      a.timestamp_us = now;
      a.tcp_options = kOptions;
      flow.packets.push_back(tcp_packet(a));
      uint32_t consume = payload + ((flags & netdiff::tcp::kSyn) ? 1 : 0) +
                         ((flags & netdiff::tcp::kFin) ? 1 : 0);
      (from_client ? next_c : next_s) += consume;
      now += 40 + int64_t(rng.below(1200));
    };

    push(true, 0, netdiff::tcp::kSyn);
    push(false, 0, netdiff::tcp::kSyn | netdiff::tcp::kAck);
    push(true, 0, netdiff::tcp::kAck);

    const size_t target = 80 + rng.below(320);
    while (flow.packets.size() + 3 < target) {
      push(true, 100 + static_cast<uint32_t>(rng.below(400)),
           netdiff::tcp::kAck | (rng.bernoulli(0.3) ? netdiff::tcp::kPsh : 0));
      size_t burst = 1 + rng.below(7);
      for (size_t b = 0; b < burst && flow.packets.size() + 3 < target; ++b) {
        uint32_t payload =
            rng.bernoulli(0.8) ? 1460 : (rng.bernoulli(0.5) ? 960 : 460);
        push(false, payload, netdiff::tcp::kAck);
        if (b % 2 == 1) push(true, 0, netdiff::tcp::kAck);
      }
    }
    if (rng.bernoulli(0.5)) {
      push(true, 0, netdiff::tcp::kFin | netdiff::tcp::kAck);
      push(false, 0, netdiff::tcp::kFin | netdiff::tcp::kAck);
      push(true, 0, netdiff::tcp::kAck);
    }
    flows.push_back(std::move(flow));
  }
  return flows;
}

FlowTrace udp_flow(int n_packets, uint64_t seed) {
  Rng rng(derive_seed(seed, 0xD06F00D));
  FlowTrace flow;
  flow.label = "voip";
  const uint32_t a_ip = ip_from_string("10.0.7.1");
  const uint32_t b_ip = ip_from_string("172.16.9.2");
  const uint16_t a_port = static_cast<uint16_t>(30000 + rng.below(100));
  const uint16_t b_port = 3478;
  flow.five_tuple = {a_ip, b_ip, a_port, b_port, 17};
  uint16_t ident_a = rng.u16(), ident_b = rng.u16();
  int64_t now = 0;
  for (int i = 0; i < n_packets; ++i) {
    bool forward = i % 2 == 0;
    UdpArgs u;
    u.src_ip = forward ? a_ip : b_ip;
    u.dst_ip = forward ? b_ip : a_ip;
    u.src_port = forward ? a_port : b_port;
    u.dst_port = forward ? b_port : a_port;
    u.ttl = forward ? 64 : 58;
    u.ident = forward ? ident_a++ : ident_b++;
    u.payload_len = 120 + static_cast<uint32_t>(rng.below(60));
    u.timestamp_us = now;
    flow.packets.push_back(udp_packet(u));
    now += 20000 + int64_t(rng.below(100));
  }
  return flow;
}

FlowTrace icmp_flow(int n_packets, uint64_t seed) {
  Rng rng(derive_seed(seed, 0x1C3C3));
  FlowTrace flow;
  flow.label = "ping";
  const uint32_t a_ip = ip_from_string("10.0.7.9");
  const uint32_t b_ip = ip_from_string("8.8.8.8");
  flow.five_tuple = {a_ip, b_ip, 0, 0, 1};
  uint16_t ident = rng.u16();
  int64_t now = 0;
  for (int i = 0; i < n_packets; ++i) {
    bool request = i % 2 == 0;
    IcmpArgs c;
    c.src_ip = request ? a_ip : b_ip;
    c.dst_ip = request ? b_ip : a_ip;
    c.type = request ? 8 : 0;
    c.ident = ident;
    c.seq = static_cast<uint16_t>(i / 2);
    c.ttl = request ? 64 : 117;
    c.payload_len = 56;
    c.timestamp_us = now;
    flow.packets.push_back(icmp_packet(c));
    now += request ? 2 : 24000;
  }
  return flow;
}

FlowTrace random_flow(Rng& rng) {
  FlowTrace flow;
  int proto = static_cast<int>(rng.below(3));
  uint32_t src_ip = rng.u32(), dst_ip = rng.u32();
  uint16_t src_port = rng.u16(), dst_port = rng.u16();
  int n = 1 + static_cast<int>(rng.below(20));
  int64_t now = 0;

  auto random_options = [&](size_t max_words) {
    std::vector<uint8_t> opts;
    if (rng.bernoulli(0.4)) {
      size_t words = rng.below(max_words + 1);
      for (size_t i = 0; i < words * 4; ++i) {
        opts.push_back(static_cast<uint8_t>(rng.below(256)));
      }
    }
    return opts;
  };

  for (int i = 0; i < n; ++i) {
    bool forward = rng.bernoulli(0.5);
    now += int64_t(rng.below(5000));
    switch (proto) {
      case 0: {
        TcpArgs a;
        a.src_ip = forward ? src_ip : dst_ip;
        a.dst_ip = forward ? dst_ip : src_ip;
        a.src_port = forward ? src_port : dst_port;
        a.dst_port = forward ? dst_port : src_port;
        a.seq = rng.u32();
        a.ack = rng.u32();
        a.flags = static_cast<uint8_t>(rng.below(256));
        a.window = rng.u16();
        a.ttl = static_cast<uint8_t>(1 + rng.below(255));
        a.tos = static_cast<uint8_t>(rng.below(256));
        a.ident = rng.u16();
        a.urgent_ptr = rng.u16();
        a.payload_len = static_cast<uint32_t>(rng.below(1461));
        a.timestamp_us = now;
        a.tcp_options = random_options(10);
        a.ip_options = random_options(10);
        flow.packets.push_back(tcp_packet(a));
        break;
      }
      case 1: {
        UdpArgs u;
        u.src_ip = forward ? src_ip : dst_ip;
        u.dst_ip = forward ? dst_ip : src_ip;
        u.src_port = forward ? src_port : dst_port;
        u.dst_port = forward ? dst_port : src_port;
        u.ttl = static_cast<uint8_t>(1 + rng.below(255));
        u.ident = rng.u16();
        u.payload_len = static_cast<uint32_t>(rng.below(1461));
        u.timestamp_us = now;
        flow.packets.push_back(udp_packet(u));
        break;
      }
      default: {
        IcmpArgs c;
        c.src_ip = forward ? src_ip : dst_ip;
        c.dst_ip = forward ? dst_ip : src_ip;
        c.type = static_cast<uint8_t>(rng.below(256));
        c.code = static_cast<uint8_t>(rng.below(256));
        c.ident = rng.u16();
        c.seq = rng.u16();
        c.ttl = static_cast<uint8_t>(1 + rng.below(255));
        c.payload_len = static_cast<uint32_t>(rng.below(1461));
        c.timestamp_us = now;
        flow.packets.push_back(icmp_packet(c));
        break;
      }
    }
  }
  flow.five_tuple = tuple_of(flow.packets.front());
  return flow;
}

}  // namespace craft
