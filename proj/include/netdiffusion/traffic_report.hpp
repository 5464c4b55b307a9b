#ifndef NETDIFF_TRAFFIC_REPORT_HPP
#define NETDIFF_TRAFFIC_REPORT_HPP

#include <array>
#include <map>
#include <span>
#include <string>

#include "netdiffusion/packet.hpp"

namespace netdiff {

// Network-analysis summary of one capture: the metrics a traffic analyst
// pulls from a trace (counts, protocol/flag mix, ports, sizes, TTL,
// sessions, error counters).
struct TrafficReport {
  uint64_t packet_count = 0;
  uint64_t byte_count = 0;  // sum of IPv4 total lengths
  double avg_tcp_window = 0.0;
  uint64_t proto_tcp = 0, proto_udp = 0, proto_icmp = 0, proto_other = 0;
  uint64_t flag_syn = 0, flag_ack = 0, flag_fin = 0;
  uint64_t flag_rst = 0, flag_psh = 0, flag_urg = 0;
  std::map<uint16_t, uint64_t> src_ports, dst_ports;
  // Bins: 0-499, 500-999, 1000-1499, 1500-1999, 2000+.
  std::array<uint64_t, 5> size_bins{};
  std::map<uint32_t, uint64_t> src_ips, dst_ips;
  double avg_ttl = 0.0;
  uint64_t sessions = 0;  // distinct unordered 5-tuples
  uint64_t checksum_errors = 0;
  uint64_t fragmented_packets = 0;
  uint64_t fragmented_datagrams = 0;

  // Full precision JSON; averages in the text table are two decimals.
  std::string to_json() const;
};

TrafficReport build_report(std::span<const Packet> packets);

// Side-by-side text table; pass nullptr to print a single column.
std::string report_table(const TrafficReport& a, const TrafficReport* b);

}  // namespace netdiff

#endif
