#ifndef NETDIFF_REPAIR_HPP
#define NETDIFF_REPAIR_HPP

#include <set>
#include <string>
#include <vector>

#include "netdiffusion/errors.hpp"
#include "netdiffusion/nprint.hpp"
#include "netdiffusion/profile.hpp"

namespace netdiff {

// Fields whose values must be exact for protocol validity vs fields that
// tolerate variation and are never rewritten by repair.
struct FieldClass {
  std::set<std::string> critical;
  std::set<std::string> flexible;
};
const FieldClass& default_field_classes();

// Rule ids implemented by the repair engine and the validator, in
// evaluation order. data/dependency_rules.json mirrors this list.
std::vector<std::string> intra_rule_ids();
std::vector<std::string> inter_rule_ids();

struct ComplianceReport {
  std::vector<Violation> violations;
  int n_packets = 0;
  int dropped_rows = 0;
  // Changed trits / populated trits of the pre-repair matrix.
  double repaired_fraction = 0.0;
  int checksum_errors = 0;

  bool compliant() const { return violations.empty(); }
  std::string to_json() const;
};

// Running tally shared by the repair stages.
struct RepairStats {
  uint64_t changed_trits = 0;
  uint64_t populated_trits = 0;  // denominator: pre-repair populated count
  int dropped_rows = 0;
  std::vector<Violation> notes;

  double repaired_fraction() const {
    return populated_trits == 0
               ? 0.0
               : double(changed_trits) / double(populated_trits);
  }
};

uint64_t count_populated(const NprintMatrix& m);

// Per-row structural fixes: version, IHL/data-offset vs populated prefix,
// protocol field vs region, total length, reserved and fragment bits.
// Rows that cannot form a legal header are dropped. Checksums are left to
// finalize_checksums. Deterministic; idempotent on valid input.
NprintMatrix repair_intra(const NprintMatrix& m, RepairStats* stats = nullptr);

// Flow-level fixes: 5-tuple uniformity via per-column majority vote
// snapped to a sampled real tuple, per-row direction assignment, TCP
// handshake and seq/ack chain, FIN/RST normalization, per-direction IP ID.
// Requires repair_intra to have run.
NprintMatrix repair_inter(const NprintMatrix& m, const ClassProfile& profile,
                          uint64_t seed, RepairStats* stats = nullptr);

// IPv4 header checksum and TCP/UDP/ICMP checksums over the zero-filled
// payload. Runs last because inter repair rewrites checksummed fields.
NprintMatrix finalize_checksums(const NprintMatrix& m,
                                RepairStats* stats = nullptr);

// First timestamp 0; deltas resampled i.i.d. from the profile's pooled
// inter-arrivals. Empty sample pool falls back to uniform 1 ms deltas and
// records a note.
FlowTrace assign_timestamps(FlowTrace f, const ClassProfile& profile,
                            uint64_t seed,
                            std::vector<Violation>* notes = nullptr);

// Full repair chain: intra -> inter -> checksums -> decode -> timestamps.
struct RepairedFlow {
  NprintMatrix matrix;
  FlowTrace flow;
  ComplianceReport report;
};
RepairedFlow repair_pipeline(const NprintMatrix& generated,
                             const ClassProfile& profile, uint64_t seed);

// Offline compliance check: every intra rule, checksums, handshake
// ordering, seq/ack chain, 5-tuple uniformity, monotone timestamps.
// An empty violation list means fully compliant.
ComplianceReport validate(const FlowTrace& f);

}  // namespace netdiff

#endif
