#ifndef NETDIFF_PCAP_IO_HPP
#define NETDIFF_PCAP_IO_HPP

#include <filesystem>
#include <span>
#include <vector>

#include "netdiffusion/packet.hpp"

namespace netdiff {

// Reads a raw-IP pcap (both byte orders, microsecond timestamps).
// Timestamps are rebased so the first packet is at 0 us.
// Accepted link types: 101 (LINKTYPE_RAW) and 129 (rawip4 alias).
std::vector<Packet> read_pcap(const std::filesystem::path& path);

// Little-endian pcap, link type 101, snaplen 65535. Payload bytes are
// zero-filled to payload_len. Write is atomic (temp file + rename).
void write_pcap(std::span<const Packet> packets,
                const std::filesystem::path& path);

// Partition by unordered 5-tuple. Within each flow the original packet
// order is preserved; flows are ordered by first-packet time. Packets of
// unknown transport group by (src, dst, protocol) with ports 0.
std::vector<FlowTrace> split_flows(std::span<const Packet> packets);

}  // namespace netdiff

#endif
