#include "netdiffusion/repair.hpp"

#include <algorithm>
#include <bit>
#include <optional>

#include <nlohmann/json.hpp>

#include "netdiffusion/checksum.hpp"
#include "netdiffusion/fields.hpp"
#include "netdiffusion/rng.hpp"

namespace netdiff {

const FieldClass& default_field_classes() {
  static const FieldClass kClasses{
      // Exact values required for protocol validity.
      {"ipv4.version", "ipv4.ihl", "ipv4.total_length", "ipv4.flags",
       "ipv4.frag_offset", "ipv4.protocol", "ipv4.checksum", "ipv4.ident",
       "ipv4.src_addr", "ipv4.dst_addr", "tcp.src_port", "tcp.dst_port",
       "tcp.seq", "tcp.ack", "tcp.data_offset", "tcp.reserved",
       "tcp.flags.syn", "tcp.flags.ack", "tcp.flags.fin", "tcp.flags.rst",
       "tcp.checksum", "udp.src_port", "udp.dst_port", "udp.length",
       "udp.checksum", "icmp.checksum"},
      // Tolerate variation; repair never rewrites these.
      {"ipv4.tos", "ipv4.ttl", "tcp.window", "tcp.flags.psh", "tcp.flags.urg",
       "tcp.urgent_ptr", "icmp.type", "icmp.code"}};
  return kClasses;
}

std::vector<std::string> intra_rule_ids() {
  return {"intra.region_exclusive", "intra.min_header", "intra.version",
          "intra.ihl",      "intra.data_offset",  "intra.protocol",
          "intra.fragment", "intra.tcp_reserved", "intra.total_length",
          "intra.udp_length"};
}

std::vector<std::string> inter_rule_ids() {
  return {"inter.transport_uniform", "inter.tuple_uniform",
          "inter.handshake",         "inter.seq_chain",
          "inter.ack_chain",         "inter.fin_teardown",
          "inter.rst_teardown",      "inter.ip_ident",
          "inter.checksum",          "inter.time_order"};
}

std::string ComplianceReport::to_json() const {
  nlohmann::json j;
  j["packets"] = n_packets;
  j["dropped_rows"] = dropped_rows;
  j["repaired_fraction"] = repaired_fraction;
  j["checksum_errors"] = checksum_errors;
  j["compliant"] = compliant();
  nlohmann::json vs = nlohmann::json::array();
  for (const Violation& v : violations) {
    vs.push_back({{"packet", v.packet_index},
                  {"field", v.field},
                  {"rule", v.rule},
                  {"message", v.message}});
  }
  j["violations"] = vs;
  return j.dump(2);
}

uint64_t count_populated(const NprintMatrix& m) {
  uint64_t n = 0;
  for (int r = 0; r < m.n_real; ++r) {
    for (Trit t : m.row(r)) {
      if (t != -1) ++n;
    }
  }
  return n;
}

namespace {

uint64_t populated_in_row(std::span<const Trit> row) {
  uint64_t n = 0;
  for (Trit t : row) {
    if (t != -1) ++n;
  }
  return n;
}

uint64_t diff_trits(std::span<const Trit> a, std::span<const Trit> b) {
  uint64_t n = 0;
  for (int i = 0; i < layout::kRowBits; ++i) {
    if (a[i] != b[i]) ++n;
  }
  return n;
}

// Clears stray bits after the first vacant column and rounds the prefix
// down to `align` bits. Returns the final prefix length, or -1 when it
// cannot reach `min_bits` (row is unrepairable).
int normalize_prefix(std::span<Trit> row, layout::Region reg, int align,
                     int min_bits) {
  int prefix = 0;
  while (prefix < reg.bits && row[reg.offset + prefix] != -1) ++prefix;
  for (int i = prefix; i < reg.bits; ++i) row[reg.offset + i] = -1;
  prefix -= prefix % align;
  for (int i = prefix; i < reg.bits; ++i) row[reg.offset + i] = -1;
  if (prefix < min_bits) return -1;
  return prefix;
}

struct RowParts {
  std::vector<uint8_t> ip, tr;
  Transport t = Transport::kOther;

  uint32_t payload() const {
    int64_t v = int64_t(ipv4::total_length(ip)) - int64_t(ip.size()) -
                int64_t(tr.size());
    return v < 0 ? 0 : static_cast<uint32_t>(v);
  }
  void set_payload(uint32_t payload_len) {
    ipv4::set_total_length(
        ip, static_cast<uint16_t>(ip.size() + tr.size() + payload_len));
    if (t == Transport::kUdp) {
      udp::set_length(tr, static_cast<uint16_t>(8 + payload_len));
    }
  }
  Packet to_packet() const {
    Packet p;
    p.ip_header = ip;
    p.transport_header = tr;
    p.transport = t;
    p.payload_len = payload();
    return p;
  }
};

void write_parts(std::span<Trit> row, const RowParts& parts) {
  std::fill(row.begin(), row.end(), Trit{-1});
  unpack_bytes(parts.ip, row.subspan(layout::kIpv4.offset));
  unpack_bytes(parts.tr,
               row.subspan(layout::transport_region(parts.t).offset));
}

RowParts read_parts(std::span<const Trit> row) {
  RowParts parts;
  int ip_bits = populated_prefix(row, layout::kIpv4);
  parts.ip = pack_bits(row.subspan(layout::kIpv4.offset), ip_bits);
  for (Transport t : {Transport::kTcp, Transport::kUdp, Transport::kIcmp}) {
    layout::Region reg = layout::transport_region(t);
    if (region_populated(row, reg)) {
      parts.t = t;
      parts.tr = pack_bits(row.subspan(reg.offset),
                           populated_prefix(row, reg));
      break;
    }
  }
  return parts;
}

int popcount32(uint32_t v) { return std::popcount(v); }

}  // namespace

NprintMatrix repair_intra(const NprintMatrix& m, RepairStats* stats) {
  RepairStats local;
  RepairStats& st = stats ? *stats : local;
  if (st.populated_trits == 0) st.populated_trits = count_populated(m);

  NprintMatrix out;
  out.label = m.label;
  int kept = 0;
  for (int r = 0; r < m.n_real; ++r) {
    BitRow work;
    auto src = m.row(r);
    std::copy(src.begin(), src.end(), work.begin());

    struct RegionInfo {
      Transport t;
      layout::Region reg;
      int populated;
    };
    std::vector<RegionInfo> present;
    for (Transport t : {Transport::kTcp, Transport::kUdp, Transport::kIcmp}) {
      layout::Region reg = layout::transport_region(t);
      int n = 0;
      for (int i = 0; i < reg.bits; ++i) {
        if (work[reg.offset + i] != -1) ++n;
      }
      if (n > 0) present.push_back({t, reg, n});
    }

    auto drop = [&](const std::string& why) {
      st.changed_trits += populated_in_row(src);
      ++st.dropped_rows;
      st.notes.push_back({r, "", "intra.min_header", why});
    };

    if (present.empty()) {
      drop("no transport region populated");
      continue;
    }
    if (present.size() > 1) {
      // Keep the most populated region; clear the rest.
      auto best = std::max_element(
          present.begin(), present.end(),
          [](const RegionInfo& a, const RegionInfo& b) {
            return a.populated < b.populated;
          });
      for (const RegionInfo& info : present) {
        if (info.t == best->t) continue;
        for (int i = 0; i < info.reg.bits; ++i) {
          work[info.reg.offset + i] = -1;
        }
      }
      st.notes.push_back({r, "", "intra.region_exclusive",
                          "multiple transport regions populated"});
      present = {*best};
    }
    Transport t = present.front().t;

    int ip_bits = normalize_prefix(work, layout::kIpv4, 32, 160);
    if (ip_bits < 0) {
      drop("IPv4 prefix shorter than 20 bytes");
      continue;
    }
    int t_bits;
    if (t == Transport::kTcp) {
      t_bits = normalize_prefix(work, layout::kTcp, 32, 160);
    } else {
      t_bits = normalize_prefix(work, layout::transport_region(t), 64, 64);
    }
    if (t_bits < 0) {
      drop("transport prefix shorter than its minimum header");
      continue;
    }

    RowParts parts;
    parts.t = t;
    parts.ip = pack_bits(std::span<const Trit>(work).subspan(layout::kIpv4.offset),
                         ip_bits);
    parts.tr = pack_bits(std::span<const Trit>(work).subspan(
                             layout::transport_region(t).offset),
                         t_bits);

    ipv4::set_version_ihl(parts.ip, 4, static_cast<uint8_t>(ip_bits / 32));
    ipv4::set_protocol(parts.ip, protocol_number(t));
    ipv4::set_flags_frag(parts.ip, ipv4::df(parts.ip), 0);
    if (t == Transport::kTcp) {
      tcp::set_data_offset(parts.tr, static_cast<uint8_t>(t_bits / 32));
      tcp::clear_reserved(parts.tr);
    }
    // Re-derive the payload length from the generated total-length value;
    // impossible values clamp to an empty payload.
    parts.set_payload(parts.payload());

    write_parts(out.row(kept), parts);
    st.changed_trits += diff_trits(src, out.row(kept));
    ++kept;
  }
  out.n_real = kept;
  return out;
}

NprintMatrix repair_inter(const NprintMatrix& m, const ClassProfile& profile,
                          uint64_t seed, RepairStats* stats) {
  RepairStats local;
  RepairStats& st = stats ? *stats : local;
  if (profile.tuple_samples.empty()) {
    throw DataError("profile has no tuple samples");
  }

  // Decode rows (all valid after repair_intra) and unify the transport.
  std::vector<RowParts> rows;
  std::vector<int> origin;
  uint64_t count_t[3] = {0, 0, 0};
  for (int r = 0; r < m.n_real; ++r) {
    RowParts parts = read_parts(m.row(r));
    ++count_t[static_cast<int>(parts.t)];
    rows.push_back(std::move(parts));
    origin.push_back(r);
  }
  NprintMatrix out;
  out.label = m.label;
  if (rows.empty()) return out;

  Transport majority = Transport::kTcp;
  if (count_t[1] > count_t[static_cast<int>(majority)]) majority = Transport::kUdp;
  if (count_t[2] > count_t[static_cast<int>(majority)]) majority = Transport::kIcmp;
  {
    std::vector<RowParts> kept;
    std::vector<int> kept_origin;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].t == majority) {
        kept.push_back(std::move(rows[i]));
        kept_origin.push_back(origin[i]);
      } else {
        st.changed_trits += populated_in_row(m.row(origin[i]));
        ++st.dropped_rows;
        st.notes.push_back({origin[i], "", "inter.transport_uniform",
                            "row transport disagrees with flow majority"});
      }
    }
    rows = std::move(kept);
    origin = std::move(kept_origin);
  }
  const bool has_ports =
      majority == Transport::kTcp || majority == Transport::kUdp;

  // Majority vote per address/port bit column, then snap to the nearest
  // sampled real 5-tuple (both orientations considered).
  auto vote_u32 = [&](auto getter) {
    uint32_t v = 0;
    for (int bit = 0; bit < 32; ++bit) {
      uint64_t ones = 0;
      for (const RowParts& p : rows) {
        if ((getter(p) >> (31 - bit)) & 1) ++ones;
      }
      v = (v << 1) | (ones * 2 >= rows.size() ? 1 : 0);
    }
    return v;
  };
  uint32_t vsrc = vote_u32([](const RowParts& p) { return ipv4::src_addr(p.ip); });
  uint32_t vdst = vote_u32([](const RowParts& p) { return ipv4::dst_addr(p.ip); });
  uint32_t vports = 0;
  if (has_ports) {
    vports = vote_u32([](const RowParts& p) {
      return (uint32_t(get_be16(p.tr, 0)) << 16) | get_be16(p.tr, 2);
    });
  }

  auto tuple_dist = [&](const FiveTuple& t) {
    uint32_t tports = (uint32_t(t.src_port) << 16) | t.dst_port;
    uint32_t rports = (uint32_t(t.dst_port) << 16) | t.src_port;
    int fwd = popcount32(vsrc ^ t.src_ip) + popcount32(vdst ^ t.dst_ip);
    int rev = popcount32(vsrc ^ t.dst_ip) + popcount32(vdst ^ t.src_ip);
    if (has_ports) {
      fwd += popcount32(vports ^ tports);
      rev += popcount32(vports ^ rports);
    }
    return std::min(fwd, rev);
  };
  const FiveTuple* chosen = nullptr;
  int best_dist = 0;
  uint8_t want_proto = protocol_number(majority);
  for (const FiveTuple& t : profile.tuple_samples) {
    if (t.protocol != want_proto) continue;
    int d = tuple_dist(t);
    if (!chosen || d < best_dist) {
      chosen = &t;
      best_dist = d;
    }
  }
  if (!chosen) {
    // No sample of the majority protocol; fall back to the closest of any.
    for (const FiveTuple& t : profile.tuple_samples) {
      int d = tuple_dist(t);
      if (!chosen || d < best_dist) {
        chosen = &t;
        best_dist = d;
      }
    }
    st.notes.push_back({-1, "", "inter.tuple_uniform",
                        "no tuple sample matches the flow protocol"});
  }
  FiveTuple tuple = *chosen;
  tuple.protocol = want_proto;
  if (!has_ports) tuple.src_port = tuple.dst_port = 0;

  // Direction per row: the orientation whose addresses are closer to the
  // row's own generated bits.
  auto row_is_forward = [&](const RowParts& p) {
    int fwd = popcount32(ipv4::src_addr(p.ip) ^ tuple.src_ip) +
              popcount32(ipv4::dst_addr(p.ip) ^ tuple.dst_ip);
    int rev = popcount32(ipv4::src_addr(p.ip) ^ tuple.dst_ip) +
              popcount32(ipv4::dst_addr(p.ip) ^ tuple.src_ip);
    if (has_ports) {
      fwd += popcount32(uint32_t(get_be16(p.tr, 0) ^ tuple.src_port)) +
             popcount32(uint32_t(get_be16(p.tr, 2) ^ tuple.dst_port));
      rev += popcount32(uint32_t(get_be16(p.tr, 0) ^ tuple.dst_port)) +
             popcount32(uint32_t(get_be16(p.tr, 2) ^ tuple.src_port));
    }
    return fwd <= rev;
  };
  std::vector<bool> forward(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) forward[i] = row_is_forward(rows[i]);

  Rng rng(derive_seed(seed, kStreamInter));

  if (majority == Transport::kTcp) {
    const bool full_handshake = rows.size() >= 3;
    if (!full_handshake) {
      st.notes.push_back({-1, "tcp.flags", "inter.handshake",
                          "flow shorter than a handshake; repaired to a "
                          "mid-stream pattern"});
    } else {
      forward[0] = true;
      forward[1] = false;
      forward[2] = true;
    }
    size_t data_begin = full_handshake ? 3 : 0;

    // RST teardown: everything after the first RST row is removed.
    std::optional<size_t> rst_at;
    for (size_t i = data_begin; i < rows.size(); ++i) {
      if (tcp::flags(rows[i].tr) & tcp::kRst) {
        rst_at = i;
        break;
      }
    }
    if (rst_at && *rst_at + 1 < rows.size()) {
      for (size_t i = *rst_at + 1; i < rows.size(); ++i) {
        st.changed_trits += populated_in_row(m.row(origin[i]));
        ++st.dropped_rows;
      }
      st.notes.push_back({origin[*rst_at], "tcp.flags", "inter.rst_teardown",
                          "rows after RST removed"});
      rows.resize(*rst_at + 1);
      origin.resize(*rst_at + 1);
      forward.resize(*rst_at + 1);
    }

    // FIN normalization: at most one FIN per direction, at that
    // direction's last data row.
    bool fin_dir[2] = {false, false};
    size_t last_dir[2] = {0, 0};
    bool seen_dir[2] = {false, false};
    for (size_t i = data_begin; i < rows.size(); ++i) {
      int d = forward[i] ? 0 : 1;
      if (tcp::flags(rows[i].tr) & tcp::kFin) fin_dir[d] = true;
      last_dir[d] = i;
      seen_dir[d] = true;
    }

    uint32_t isn_f = rng.u32();
    uint32_t isn_r = rng.u32();
    uint32_t next[2];
    if (full_handshake) {
      RowParts& syn = rows[0];
      tcp::set_flags(syn.tr, tcp::kSyn);
      tcp::set_seq(syn.tr, isn_f);
      tcp::set_ack(syn.tr, 0);
      tcp::set_urgent_ptr(syn.tr, 0);
      syn.set_payload(0);

      RowParts& synack = rows[1];
      tcp::set_flags(synack.tr, tcp::kSyn | tcp::kAck);
      tcp::set_seq(synack.tr, isn_r);
      tcp::set_ack(synack.tr, isn_f + 1);
      tcp::set_urgent_ptr(synack.tr, 0);
      synack.set_payload(0);

      RowParts& ack = rows[2];
      tcp::set_flags(ack.tr, tcp::kAck);
      tcp::set_seq(ack.tr, isn_f + 1);
      tcp::set_ack(ack.tr, isn_r + 1);
      tcp::set_urgent_ptr(ack.tr, 0);
      ack.set_payload(0);

      next[0] = isn_f + 1;
      next[1] = isn_r + 1;
    } else {
      next[0] = isn_f;
      next[1] = isn_r;
    }

    for (size_t i = data_begin; i < rows.size(); ++i) {
      RowParts& p = rows[i];
      int d = forward[i] ? 0 : 1;
      uint8_t flags = tcp::flags(p.tr);
      uint8_t repaired = tcp::kAck |
                         (flags & (tcp::kPsh | tcp::kUrg));  // flexible bits
      if (rst_at && i == *rst_at) {
        repaired |= tcp::kRst;
        p.set_payload(0);
      }
      if (fin_dir[d] && seen_dir[d] && last_dir[d] == i && !(rst_at && i == *rst_at)) {
        repaired |= tcp::kFin;
      }
      tcp::set_flags(p.tr, repaired);
      tcp::set_seq(p.tr, next[d]);
      tcp::set_ack(p.tr, next[1 - d]);
      next[d] += p.payload() + ((repaired & tcp::kFin) ? 1 : 0);
    }
  }

  // 5-tuple rewrite and per-direction IP ID counters.
  uint16_t ident[2] = {rng.u16(), rng.u16()};
  for (size_t i = 0; i < rows.size(); ++i) {
    RowParts& p = rows[i];
    const bool fwd = forward[i];
    ipv4::set_src_addr(p.ip, fwd ? tuple.src_ip : tuple.dst_ip);
    ipv4::set_dst_addr(p.ip, fwd ? tuple.dst_ip : tuple.src_ip);
    if (has_ports) {
      uint16_t sp = fwd ? tuple.src_port : tuple.dst_port;
      uint16_t dp = fwd ? tuple.dst_port : tuple.src_port;
      set_be16(p.tr, 0, sp);
      set_be16(p.tr, 2, dp);
    }
    int d = fwd ? 0 : 1;
    ipv4::set_ident(p.ip, ident[d]++);
  }

  for (size_t i = 0; i < rows.size(); ++i) {
    write_parts(out.row(static_cast<int>(i)), rows[i]);
    st.changed_trits +=
        diff_trits(m.row(origin[i]), out.row(static_cast<int>(i)));
  }
  out.n_real = static_cast<int>(rows.size());
  return out;
}

NprintMatrix finalize_checksums(const NprintMatrix& m, RepairStats* stats) {
  RepairStats local;
  RepairStats& st = stats ? *stats : local;
  NprintMatrix out;
  out.label = m.label;
  out.n_real = m.n_real;
  for (int r = 0; r < m.n_real; ++r) {
    RowParts parts = read_parts(m.row(r));
    Packet p = parts.to_packet();
    ipv4::set_checksum(parts.ip, ipv4_header_checksum(parts.ip));
    p.ip_header = parts.ip;
    uint16_t tsum = transport_checksum(p);
    switch (parts.t) {
      case Transport::kTcp: tcp::set_checksum(parts.tr, tsum); break;
      case Transport::kUdp: udp::set_checksum(parts.tr, tsum); break;
      case Transport::kIcmp: icmp::set_checksum(parts.tr, tsum); break;
      default: break;
    }
    write_parts(out.row(r), parts);
    st.changed_trits += diff_trits(m.row(r), out.row(r));
  }
  return out;
}

FlowTrace assign_timestamps(FlowTrace f, const ClassProfile& profile,
                            uint64_t seed, std::vector<Violation>* notes) {
  Rng rng(derive_seed(seed, kStreamTimestamps));
  const auto& samples = profile.inter_arrival_us;
  if (samples.empty() && f.packets.size() > 1 && notes) {
    notes->push_back({-1, "timestamp", "inter.time_order",
                      "profile has no inter-arrival samples; using uniform "
                      "1 ms deltas"});
  }
  int64_t t = 0;
  for (size_t i = 0; i < f.packets.size(); ++i) {
    if (i > 0) {
      int64_t delta =
          samples.empty() ? 1000 : samples[rng.below(samples.size())];
      t += delta;
    }
    f.packets[i].timestamp_us = t;
  }
  return f;
}

RepairedFlow repair_pipeline(const NprintMatrix& generated,
                             const ClassProfile& profile, uint64_t seed) {
  RepairStats stats;
  stats.populated_trits = count_populated(generated);

  NprintMatrix m = repair_intra(generated, &stats);
  m = repair_inter(m, profile, seed, &stats);
  m = finalize_checksums(m, &stats);

  RepairedFlow result;
  result.flow = decode_flow(m);
  result.flow = assign_timestamps(std::move(result.flow), profile, seed,
                                  &stats.notes);
  result.matrix = std::move(m);
  result.report.violations = std::move(stats.notes);
  result.report.n_packets = static_cast<int>(result.flow.packets.size());
  result.report.dropped_rows = stats.dropped_rows;
  result.report.repaired_fraction = stats.repaired_fraction();
  return result;
}

}  // namespace netdiff
