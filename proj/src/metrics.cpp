#include "netdiffusion/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "netdiffusion/errors.hpp"
#include "netdiffusion/fields.hpp"

namespace netdiff {

const std::vector<std::string>& known_fields() {
  static const std::vector<std::string> kFields = {
      "ipv4.version",   "ipv4.ihl",        "ipv4.tos",
      "ipv4.total_length", "ipv4.ident",   "ipv4.flags",
      "ipv4.frag_offset", "ipv4.ttl",      "ipv4.protocol",
      "ipv4.checksum",  "ipv4.src_addr",   "ipv4.dst_addr",
      "tcp.src_port",   "tcp.dst_port",    "tcp.seq",
      "tcp.ack",        "tcp.data_offset", "tcp.flags",
      "tcp.window",     "tcp.checksum",    "tcp.urgent_ptr",
      "udp.src_port",   "udp.dst_port",    "udp.length",
      "udp.checksum",   "icmp.type",       "icmp.code",
      "icmp.checksum"};
  return kFields;
}

std::optional<uint64_t> field_value(const Packet& p, const std::string& field) {
  const auto& ip = p.ip_header;
  const auto& th = p.transport_header;
  if (field.starts_with("ipv4.")) {
    if (field == "ipv4.version") return ipv4::version(ip);
    if (field == "ipv4.ihl") return ipv4::ihl(ip);
    if (field == "ipv4.tos") return ipv4::tos(ip);
    if (field == "ipv4.total_length") return ipv4::total_length(ip);
    if (field == "ipv4.ident") return ipv4::ident(ip);
    if (field == "ipv4.flags") return ipv4::flags(ip);
    if (field == "ipv4.frag_offset") return ipv4::frag_offset(ip);
    if (field == "ipv4.ttl") return ipv4::ttl(ip);
    if (field == "ipv4.protocol") return ipv4::protocol(ip);
    if (field == "ipv4.checksum") return ipv4::checksum(ip);
    if (field == "ipv4.src_addr") return ipv4::src_addr(ip);
    if (field == "ipv4.dst_addr") return ipv4::dst_addr(ip);
  } else if (field.starts_with("tcp.")) {
    if (p.transport != Transport::kTcp) return std::nullopt;
    if (field == "tcp.src_port") return tcp::src_port(th);
    if (field == "tcp.dst_port") return tcp::dst_port(th);
    if (field == "tcp.seq") return tcp::seq(th);
    if (field == "tcp.ack") return tcp::ack(th);
    if (field == "tcp.data_offset") return tcp::data_offset(th);
    if (field == "tcp.flags") return tcp::flags(th);
    if (field == "tcp.window") return tcp::window(th);
    if (field == "tcp.checksum") return tcp::checksum(th);
    if (field == "tcp.urgent_ptr") return tcp::urgent_ptr(th);
  } else if (field.starts_with("udp.")) {
    if (p.transport != Transport::kUdp) return std::nullopt;
    if (field == "udp.src_port") return udp::src_port(th);
    if (field == "udp.dst_port") return udp::dst_port(th);
    if (field == "udp.length") return udp::length(th);
    if (field == "udp.checksum") return udp::checksum(th);
  } else if (field.starts_with("icmp.")) {
    if (p.transport != Transport::kIcmp) return std::nullopt;
    if (field == "icmp.type") return icmp::type(th);
    if (field == "icmp.code") return icmp::code(th);
    if (field == "icmp.checksum") return icmp::checksum(th);
  }
  throw DataError("unknown field id: " + field);
}

FieldDistribution field_distribution(std::span<const FlowTrace> flows,
                                     const std::string& field) {
  if (flows.empty()) throw DataError("cannot build a distribution from zero flows");
  if (std::find(known_fields().begin(), known_fields().end(), field) ==
      known_fields().end()) {
    throw DataError("unknown field id: " + field);
  }
  FieldDistribution d;
  d.field = field;
  std::map<uint64_t, uint64_t> counts;
  for (const FlowTrace& f : flows) {
    for (const Packet& p : f.packets) {
      if (auto v = field_value(p, field)) {
        ++counts[*v];
        ++d.samples;
      }
    }
  }
  for (auto [v, n] : counts) {
    d.probs[v] = double(n) / double(d.samples);
  }
  return d;
}

namespace {

void require_same_field(const FieldDistribution& p,
                        const FieldDistribution& q) {
  if (p.field != q.field) {
    throw DataError("field mismatch: " + p.field + " vs " + q.field);
  }
}

double prob_or_zero(const FieldDistribution& d, uint64_t v) {
  auto it = d.probs.find(v);
  return it == d.probs.end() ? 0.0 : it->second;
}

std::vector<uint64_t> union_support(const FieldDistribution& p,
                                    const FieldDistribution& q) {
  std::vector<uint64_t> keys;
  for (auto& [v, _] : p.probs) keys.push_back(v);
  for (auto& [v, _] : q.probs) {
    if (!p.probs.contains(v)) keys.push_back(v);
  }
  return keys;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double jsd(const FieldDistribution& p, const FieldDistribution& q) {
  require_same_field(p, q);
  double sum = 0.0;
  for (uint64_t v : union_support(p, q)) {
    double pp = prob_or_zero(p, v);
    double qq = prob_or_zero(q, v);
    double m = 0.5 * (pp + qq);
    if (pp > 0) sum += 0.5 * pp * std::log2(pp / m);
    if (qq > 0) sum += 0.5 * qq * std::log2(qq / m);
  }
  return clamp01(sum);
}

double tvd(const FieldDistribution& p, const FieldDistribution& q) {
  require_same_field(p, q);
  double sum = 0.0;
  for (uint64_t v : union_support(p, q)) {
    sum += std::abs(prob_or_zero(p, v) - prob_or_zero(q, v));
  }
  return clamp01(0.5 * sum);
}

double hellinger(const FieldDistribution& p, const FieldDistribution& q) {
  require_same_field(p, q);
  double sum = 0.0;
  for (uint64_t v : union_support(p, q)) {
    double d = std::sqrt(prob_or_zero(p, v)) - std::sqrt(prob_or_zero(q, v));
    sum += d * d;
  }
  return clamp01(std::sqrt(0.5 * sum));
}

namespace {

MetricScores score_pair(const FieldDistribution& p,
                        const FieldDistribution& q) {
  return {jsd(p, q), tvd(p, q), hellinger(p, q)};
}

MetricScores disjoint_scores() { return {1.0, 1.0, 1.0}; }

void finish_averages(SimilarityReport& rep) {
  if (rep.per_field.empty()) return;
  for (auto& [_, s] : rep.per_field) {
    rep.averages.jsd += s.jsd;
    rep.averages.tvd += s.tvd;
    rep.averages.hd += s.hd;
  }
  double n = double(rep.per_field.size());
  rep.averages.jsd /= n;
  rep.averages.tvd /= n;
  rep.averages.hd /= n;
}

// Distribution of one matrix column over {-1, 0, 1} across non-padding
// rows. Keys: 0 -> value 0, 1 -> value 1, 2 -> vacant.
FieldDistribution column_distribution(std::span<const NprintMatrix> mats,
                                      int col) {
  FieldDistribution d;
  d.field = "col_" + std::to_string(col);
  uint64_t counts[3] = {0, 0, 0};
  for (const NprintMatrix& m : mats) {
    for (int r = 0; r < m.n_real; ++r) {
      Trit t = m.at(r, col);
      ++counts[t == -1 ? 2 : t];
      ++d.samples;
    }
  }
  for (int k = 0; k < 3; ++k) {
    if (counts[k] > 0) d.probs[k] = double(counts[k]) / double(d.samples);
  }
  return d;
}

}  // namespace

SimilarityReport compare_matrices(std::span<const NprintMatrix> real,
                                  std::span<const NprintMatrix> synth) {
  if (real.empty() || synth.empty()) {
    throw DataError("cannot compare empty matrix sets");
  }
  SimilarityReport rep;
  rep.mode = "per-bit";
  for (int col = 0; col < layout::kRowBits; ++col) {
    FieldDistribution p = column_distribution(real, col);
    FieldDistribution q = column_distribution(synth, col);
    rep.per_field.emplace_back(p.field, score_pair(p, q));
  }
  finish_averages(rep);
  return rep;
}

SimilarityReport compare_flows(std::span<const FlowTrace> real,
                               std::span<const FlowTrace> synth,
                               bool per_bit) {
  if (real.empty() || synth.empty()) {
    throw DataError("cannot compare empty flow sets");
  }
  if (per_bit) {
    std::vector<NprintMatrix> rm, sm;
    for (const FlowTrace& f : real) rm.push_back(encode_flow(f));
    for (const FlowTrace& f : synth) sm.push_back(encode_flow(f));
    return compare_matrices(rm, sm);
  }
  SimilarityReport rep;
  rep.mode = "per-field";
  for (const std::string& field : known_fields()) {
    FieldDistribution p = field_distribution(real, field);
    FieldDistribution q = field_distribution(synth, field);
    if (p.samples == 0 && q.samples == 0) continue;  // field absent everywhere
    if (p.samples == 0 || q.samples == 0) {
      // Present on one side only: maximal dissimilarity.
      rep.per_field.emplace_back(field, disjoint_scores());
      continue;
    }
    rep.per_field.emplace_back(field, score_pair(p, q));
  }
  finish_averages(rep);
  return rep;
}

std::string SimilarityReport::to_json() const {
  nlohmann::json j;
  j["mode"] = mode;
  j["averages"] = {{"jsd", averages.jsd},
                   {"tvd", averages.tvd},
                   {"hd", averages.hd}};
  nlohmann::json fields = nlohmann::json::object();
  for (const auto& [name, s] : per_field) {
    fields[name] = {{"jsd", s.jsd}, {"tvd", s.tvd}, {"hd", s.hd}};
  }
  j["fields"] = fields;
  return j.dump(2);
}

std::string SimilarityReport::to_table() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << std::left << std::setw(24) << ("Feature (" + mode + ")")
     << std::right << std::setw(10) << "Avg. JSD" << std::setw(10)
     << "Avg. TVD" << std::setw(10) << "Avg. HD" << '\n';
  auto line = [&](const std::string& name, const MetricScores& s) {
    os << std::left << std::setw(24) << name << std::right << std::setw(10)
       << s.jsd << std::setw(10) << s.tvd << std::setw(10) << s.hd << '\n';
  };
  line("All " + std::to_string(per_field.size()) + " features", averages);
  if (mode == "per-field") {
    for (const auto& [name, s] : per_field) line(name, s);
  }
  return os.str();
}

}  // namespace netdiff
