#ifndef NETDIFF_METRICS_HPP
#define NETDIFF_METRICS_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

#include "netdiffusion/nprint.hpp"

namespace netdiff {

// Empirical categorical distribution of one decoded header field.
struct FieldDistribution {
  std::string field;
  std::map<uint64_t, double> probs;  // value -> probability
  uint64_t samples = 0;
};

// All decodable header fields, namespaced by protocol.
const std::vector<std::string>& known_fields();

// Value of `field` for this packet, or nothing when the field does not
// apply to the packet's transport.
std::optional<uint64_t> field_value(const Packet& p, const std::string& field);

// Throws DataError for an unknown field id or empty flow set.
FieldDistribution field_distribution(std::span<const FlowTrace> flows,
                                     const std::string& field);

// All three scores are in [0, 1], symmetric, and 0 iff p = q.
// JSD uses base-2 logarithms so disjoint supports score exactly 1.
double jsd(const FieldDistribution& p, const FieldDistribution& q);
double tvd(const FieldDistribution& p, const FieldDistribution& q);
double hellinger(const FieldDistribution& p, const FieldDistribution& q);

struct MetricScores {
  double jsd = 0, tvd = 0, hd = 0;
};

struct SimilarityReport {
  std::string mode;  // "per-field" or "per-bit"
  std::vector<std::pair<std::string, MetricScores>> per_field;
  MetricScores averages;

  std::string to_json() const;
  std::string to_table() const;
};

// Per-field mode scores each decoded header field as a categorical
// distribution; per-bit mode scores each of the 1088 columns over
// {-1, 0, 1}, which is the parity view of the encoded representation.
SimilarityReport compare_flows(std::span<const FlowTrace> real,
                               std::span<const FlowTrace> synth,
                               bool per_bit = false);
// Per-bit comparison directly at the matrix boundary (works for inputs
// that do not decode, e.g. random baselines).
SimilarityReport compare_matrices(std::span<const NprintMatrix> real,
                                  std::span<const NprintMatrix> synth);

}  // namespace netdiff

#endif
