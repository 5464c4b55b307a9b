#ifndef NETDIFF_PROFILE_HPP
#define NETDIFF_PROFILE_HPP

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "netdiffusion/nprint.hpp"

namespace netdiff {

// Per-column permission map for one traffic class. A column is allowed
// when real rows populate it often enough; frozen columns carry the one
// value the class always uses there.
struct RegionMask {
  std::array<uint8_t, layout::kRowBits> allowed{};  // 0/1 per column
  std::map<int, Trit> frozen;                       // column -> 0/1

  bool operator==(const RegionMask&) const = default;
};

// Everything the stand-in generator learns from one class of real flows.
struct ClassProfile {
  std::string label;
  double tau = 0.01;
  // P(trit == 1 | column populated); 0 for never-populated columns.
  std::array<double, layout::kRowBits> marginals{};
  RegionMask mask;
  // Row counts per transport, drawn as the per-row protocol mix.
  uint64_t rows_tcp = 0, rows_udp = 0, rows_icmp = 0;
  std::vector<int> length_rows;             // observed n_real values
  std::vector<int64_t> inter_arrival_us;    // pooled per-flow deltas
  std::vector<FiveTuple> tuple_samples;     // one per source flow
};

// Column allowed iff populated in >= tau of all non-padding rows.
RegionMask derive_region_mask(std::span<const FlowTrace> flows,
                              double tau = 0.01);

// Marginals over non-padding rows; columns whose populated values never
// vary are frozen; inter-arrivals pooled across flows.
ClassProfile build_class_profile(std::span<const FlowTrace> flows,
                                 const std::string& label, double tau = 0.01);

// Versioned JSON document so profiles stay inspectable and diffable.
void save_profile(const ClassProfile& p, const std::filesystem::path& path);
ClassProfile load_profile(const std::filesystem::path& path);

// Mask-constrained per-column Bernoulli sampler: the stand-in occupying
// the image generator's slot. Deterministic given (profile, seed).
NprintMatrix generate(const ClassProfile& profile, uint64_t seed);

}  // namespace netdiff

#endif
