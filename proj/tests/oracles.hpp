#ifndef NETDIFF_TESTS_ORACLES_HPP
#define NETDIFF_TESTS_ORACLES_HPP

// Independent reference implementations used to compute expected values.
// These deliberately take different algebraic or algorithmic routes than
// the library code they check.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "netdiffusion/packet.hpp"

namespace oracle {

// RFC 1071 route: collect big-endian 16-bit words (odd tail padded with a
// zero byte), sum into a wide integer, fold once at the end, complement.
uint16_t checksum_ref(std::span<const uint8_t> data);

// Brute-force unordered-5-tuple partition; returns packet indices per
// group in first-seen order.
std::vector<std::vector<size_t>>
group_by_tuple(std::span<const netdiff::Packet> packets);

// Brute-force TCP sequence walk; returns human-readable issues.
std::vector<std::string> seq_walk(const netdiff::FlowTrace& flow);

// Metric formulas through alternative identities:
//   JSD  = H(m) - (H(p) + H(q)) / 2 with base-2 entropy
//   TVD  = sum of positive parts of (p - q)
//   HD   = sqrt(1 - Bhattacharyya coefficient)
using Dist = std::map<uint64_t, double>;
double jsd_ref(const Dist& p, const Dist& q);
double tvd_ref(const Dist& p, const Dist& q);
double hd_ref(const Dist& p, const Dist& q);

}  // namespace oracle

#endif
