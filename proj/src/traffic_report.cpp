#include "netdiffusion/traffic_report.hpp"

#include <iomanip>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "netdiffusion/checksum.hpp"
#include "netdiffusion/fields.hpp"

namespace netdiff {

TrafficReport build_report(std::span<const Packet> packets) {
  TrafficReport rep;
  rep.packet_count = packets.size();
  uint64_t window_sum = 0, ttl_sum = 0;
  std::set<std::tuple<uint64_t, uint64_t, uint8_t>> sessions;
  std::set<std::tuple<uint32_t, uint32_t, uint16_t, uint8_t>> frag_datagrams;

  for (const Packet& p : packets) {
    rep.byte_count += p.total_length();
    ttl_sum += ipv4::ttl(p.ip_header);
    sessions.insert(tuple_of(p).unordered_key());
    rep.src_ips[ipv4::src_addr(p.ip_header)]++;
    rep.dst_ips[ipv4::dst_addr(p.ip_header)]++;

    uint32_t size = p.total_length();
    rep.size_bins[size >= 2000 ? 4 : size / 500]++;

    switch (p.transport) {
      case Transport::kTcp: {
        ++rep.proto_tcp;
        const auto& th = p.transport_header;
        window_sum += tcp::window(th);
        uint8_t fl = tcp::flags(th);
        if (fl & tcp::kSyn) ++rep.flag_syn;
        if (fl & tcp::kAck) ++rep.flag_ack;
        if (fl & tcp::kFin) ++rep.flag_fin;
        if (fl & tcp::kRst) ++rep.flag_rst;
        if (fl & tcp::kPsh) ++rep.flag_psh;
        if (fl & tcp::kUrg) ++rep.flag_urg;
        rep.src_ports[tcp::src_port(th)]++;
        rep.dst_ports[tcp::dst_port(th)]++;
        break;
      }
      case Transport::kUdp:
        ++rep.proto_udp;
        rep.src_ports[udp::src_port(p.transport_header)]++;
        rep.dst_ports[udp::dst_port(p.transport_header)]++;
        break;
      case Transport::kIcmp:
        ++rep.proto_icmp;
        break;
      default:
        ++rep.proto_other;
        break;
    }

    if (!ipv4_checksum_ok(p) || !transport_checksum_ok(p)) {
      ++rep.checksum_errors;
    }
    if (ipv4::mf(p.ip_header) || ipv4::frag_offset(p.ip_header) != 0) {
      ++rep.fragmented_packets;
      frag_datagrams.insert({ipv4::src_addr(p.ip_header),
                             ipv4::dst_addr(p.ip_header),
                             ipv4::ident(p.ip_header),
                             ipv4::protocol(p.ip_header)});
    }
  }
  rep.sessions = sessions.size();
  rep.fragmented_datagrams = frag_datagrams.size();
  if (rep.proto_tcp > 0) {
    rep.avg_tcp_window = double(window_sum) / double(rep.proto_tcp);
  }
  if (rep.packet_count > 0) {
    rep.avg_ttl = double(ttl_sum) / double(rep.packet_count);
  }
  return rep;
}

namespace {

nlohmann::json port_map_json(const std::map<uint16_t, uint64_t>& m) {
  nlohmann::json j = nlohmann::json::object();
  for (auto [port, n] : m) j[std::to_string(port)] = n;
  return j;
}

nlohmann::json ip_map_json(const std::map<uint32_t, uint64_t>& m) {
  nlohmann::json j = nlohmann::json::object();
  for (auto [ip, n] : m) j[ip_to_string(ip)] = n;
  return j;
}

std::string dist_string(const std::map<uint16_t, uint64_t>& m) {
  std::ostringstream os;
  bool first = true;
  for (auto [k, n] : m) {
    if (!first) os << ", ";
    os << k << " (" << n << ")";
    first = false;
  }
  return first ? "-" : os.str();
}

std::string ip_dist_string(const std::map<uint32_t, uint64_t>& m) {
  std::ostringstream os;
  bool first = true;
  for (auto [k, n] : m) {
    if (!first) os << ", ";
    os << ip_to_string(k) << " (" << n << ")";
    first = false;
  }
  return first ? "-" : os.str();
}

std::string two_dp(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

}  // namespace

std::string TrafficReport::to_json() const {
  nlohmann::json j;
  j["packet_count"] = packet_count;
  j["byte_count"] = byte_count;
  j["avg_tcp_window"] = avg_tcp_window;
  j["protocol_distribution"] = {{"tcp", proto_tcp},
                                {"udp", proto_udp},
                                {"icmp", proto_icmp},
                                {"other", proto_other}};
  j["flags_distribution"] = {{"syn", flag_syn}, {"ack", flag_ack},
                             {"fin", flag_fin}, {"rst", flag_rst},
                             {"psh", flag_psh}, {"urg", flag_urg}};
  j["src_port_distribution"] = port_map_json(src_ports);
  j["dst_port_distribution"] = port_map_json(dst_ports);
  j["packet_size_distribution"] = {{"0-499", size_bins[0]},
                                   {"500-999", size_bins[1]},
                                   {"1000-1499", size_bins[2]},
                                   {"1500-1999", size_bins[3]},
                                   {"2000+", size_bins[4]}};
  j["src_ip_distribution"] = ip_map_json(src_ips);
  j["dst_ip_distribution"] = ip_map_json(dst_ips);
  j["avg_ttl"] = avg_ttl;
  j["sessions"] = sessions;
  j["checksum_errors"] = checksum_errors;
  j["fragmented_packets"] = fragmented_packets;
  j["fragmented_datagrams"] = fragmented_datagrams;
  return j.dump(2);
}

std::string report_table(const TrafficReport& a, const TrafficReport* b) {
  struct Row {
    std::string metric, unit, va, vb;
  };
  auto flags_string = [](const TrafficReport& r) {
    std::ostringstream os;
    os << "SYN: " << r.flag_syn << ", ACK: " << r.flag_ack
       << ", FIN: " << r.flag_fin << ", RST: " << r.flag_rst
       << ", PSH: " << r.flag_psh << ", URG: " << r.flag_urg;
    return os.str();
  };
  auto proto_string = [](const TrafficReport& r) {
    std::ostringstream os;
    os << "TCP: " << r.proto_tcp << ", UDP: " << r.proto_udp
       << ", ICMP: " << r.proto_icmp;
    if (r.proto_other > 0) os << ", other: " << r.proto_other;
    return os.str();
  };
  auto bins_string = [](const TrafficReport& r) {
    std::ostringstream os;
    os << "0-499: " << r.size_bins[0] << ", 500-999: " << r.size_bins[1]
       << ", 1000-1499: " << r.size_bins[2]
       << ", 1500-1999: " << r.size_bins[3] << ", 2000+: " << r.size_bins[4];
    return os.str();
  };

  std::vector<Row> rows;
  auto add = [&](const std::string& metric, const std::string& unit,
                 auto getter) {
    rows.push_back({metric, unit, getter(a), b ? getter(*b) : std::string()});
  };
  add("Packet Count", "packets",
      [](const TrafficReport& r) { return std::to_string(r.packet_count); });
  add("Byte Count", "bytes",
      [](const TrafficReport& r) { return std::to_string(r.byte_count); });
  add("Avg. TCP Window Size", "bytes",
      [&](const TrafficReport& r) { return two_dp(r.avg_tcp_window); });
  add("Protocol Distribution", "packets", proto_string);
  add("Flags Distribution", "flags", flags_string);
  add("Src Port Distribution", "port (packets)",
      [](const TrafficReport& r) { return dist_string(r.src_ports); });
  add("Dest Port Distribution", "port (packets)",
      [](const TrafficReport& r) { return dist_string(r.dst_ports); });
  add("Packet Size Distribution", "packets", bins_string);
  add("Src IP Distribution", "packets",
      [](const TrafficReport& r) { return ip_dist_string(r.src_ips); });
  add("Dest IP Distribution", "packets",
      [](const TrafficReport& r) { return ip_dist_string(r.dst_ips); });
  add("Average TTL", "hops",
      [&](const TrafficReport& r) { return two_dp(r.avg_ttl); });
  add("Number of Sessions", "sessions",
      [](const TrafficReport& r) { return std::to_string(r.sessions); });
  add("Checksum Errors", "packets",
      [](const TrafficReport& r) { return std::to_string(r.checksum_errors); });
  add("Fragmented Packets", "packets", [](const TrafficReport& r) {
    return std::to_string(r.fragmented_packets);
  });
  add("Fragmented IP Datagrams", "datagrams", [](const TrafficReport& r) {
    return std::to_string(r.fragmented_datagrams);
  });

  size_t w_metric = 0, w_unit = 0, w_a = 0;
  for (const Row& r : rows) {
    w_metric = std::max(w_metric, r.metric.size());
    w_unit = std::max(w_unit, r.unit.size());
    w_a = std::max(w_a, r.va.size());
  }
  std::ostringstream os;
  for (const Row& r : rows) {
    os << std::left << std::setw(int(w_metric) + 2) << r.metric
       << std::setw(int(w_unit) + 2) << r.unit;
    if (b) {
      os << std::setw(int(w_a) + 2) << r.va << r.vb;
    } else {
      os << r.va;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace netdiff
