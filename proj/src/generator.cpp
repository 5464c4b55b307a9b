#include "netdiffusion/errors.hpp"
#include "netdiffusion/profile.hpp"
#include "netdiffusion/rng.hpp"

namespace netdiff {

namespace {

Transport pick_transport(const ClassProfile& p, Rng& rng) {
  uint64_t total = p.rows_tcp + p.rows_udp + p.rows_icmp;
  if (total == 0) return Transport::kTcp;
  uint64_t r = rng.below(total);
  if (r < p.rows_tcp) return Transport::kTcp;
  if (r < p.rows_tcp + p.rows_udp) return Transport::kUdp;
  return Transport::kIcmp;
}

void sample_region(const ClassProfile& p, layout::Region reg, Rng& rng,
                   std::span<Trit> row) {
  for (int i = 0; i < reg.bits; ++i) {
    int col = reg.offset + i;
    if (!p.mask.allowed[col]) continue;
    auto frozen = p.mask.frozen.find(col);
    if (frozen != p.mask.frozen.end()) {
      row[col] = frozen->second;
    } else {
      row[col] = rng.bernoulli(p.marginals[col]) ? Trit{1} : Trit{0};
    }
  }
}

}  // namespace

NprintMatrix generate(const ClassProfile& profile, uint64_t seed) {
  if (profile.length_rows.empty() || profile.tuple_samples.empty()) {
    throw DataError("profile is missing length or tuple samples");
  }
  NprintMatrix m;
  m.label = profile.label;

  Rng shape(derive_seed(seed, kStreamShape));
  int n_real = profile.length_rows[shape.below(profile.length_rows.size())];
  m.n_real = std::clamp(n_real, 1, layout::kMaxRows);

  for (int r = 0; r < m.n_real; ++r) {
    // Per-row stream: rows may be sampled in parallel and still match the
    // serial output. The transport draw comes first so intra-row region
    // exclusivity is structural.
    Rng rng(derive_seed(seed, kStreamRowBase + uint64_t(r)));
    Transport t = pick_transport(profile, rng);
    auto row = m.row(r);
    sample_region(profile, layout::kIpv4, rng, row);
    sample_region(profile, layout::transport_region(t), rng, row);
  }
  return m;
}

}  // namespace netdiff
