#include "netdiffusion/profile.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "netdiffusion/errors.hpp"

namespace netdiff {

namespace {

constexpr int kProfileVersion = 1;
constexpr const char* kProfileFormat = "netdiff-profile";

struct ColumnCounts {
  std::array<uint64_t, layout::kRowBits> populated{};
  std::array<uint64_t, layout::kRowBits> ones{};
  uint64_t rows = 0;
  uint64_t rows_tcp = 0, rows_udp = 0, rows_icmp = 0;
};

ColumnCounts count_columns(std::span<const FlowTrace> flows) {
  ColumnCounts c;
  for (const FlowTrace& f : flows) {
    NprintMatrix m = encode_flow(f);
    for (int r = 0; r < m.n_real; ++r) {
      auto row = m.row(r);
      ++c.rows;
      if (region_populated(row, layout::kTcp)) ++c.rows_tcp;
      else if (region_populated(row, layout::kUdp)) ++c.rows_udp;
      else if (region_populated(row, layout::kIcmp)) ++c.rows_icmp;
      for (int col = 0; col < layout::kRowBits; ++col) {
        if (row[col] != -1) {
          ++c.populated[col];
          if (row[col] == 1) ++c.ones[col];
        }
      }
    }
  }
  return c;
}

RegionMask mask_from_counts(const ColumnCounts& c, double tau) {
  RegionMask mask;
  for (int col = 0; col < layout::kRowBits; ++col) {
    bool allowed =
        c.populated[col] > 0 &&
        double(c.populated[col]) >= tau * double(c.rows);
    mask.allowed[col] = allowed ? 1 : 0;
    if (allowed &&
        (c.ones[col] == 0 || c.ones[col] == c.populated[col])) {
      mask.frozen[col] = c.ones[col] == 0 ? Trit{0} : Trit{1};
    }
  }
  return mask;
}

}  // namespace

RegionMask derive_region_mask(std::span<const FlowTrace> flows, double tau) {
  if (flows.empty()) throw DataError("cannot derive a mask from zero flows");
  return mask_from_counts(count_columns(flows), tau);
}

ClassProfile build_class_profile(std::span<const FlowTrace> flows,
                                 const std::string& label, double tau) {
  if (flows.empty()) throw DataError("cannot build a profile from zero flows");
  for (const FlowTrace& f : flows) {
    if (!f.label.empty() && f.label != label) {
      throw DataError("flow labeled '" + f.label +
                      "' mixed into profile '" + label + "'");
    }
  }

  ColumnCounts c = count_columns(flows);

  ClassProfile p;
  p.label = label;
  p.tau = tau;
  p.mask = mask_from_counts(c, tau);
  p.rows_tcp = c.rows_tcp;
  p.rows_udp = c.rows_udp;
  p.rows_icmp = c.rows_icmp;
  for (int col = 0; col < layout::kRowBits; ++col) {
    p.marginals[col] = c.populated[col] == 0
                           ? 0.0
                           : double(c.ones[col]) / double(c.populated[col]);
  }
  for (const FlowTrace& f : flows) {
    p.length_rows.push_back(static_cast<int>(
        std::min<size_t>(f.packets.size(), layout::kMaxRows)));
    p.tuple_samples.push_back(f.five_tuple);
    for (size_t i = 1; i < f.packets.size(); ++i) {
      int64_t d = f.packets[i].timestamp_us - f.packets[i - 1].timestamp_us;
      p.inter_arrival_us.push_back(d < 0 ? 0 : d);
    }
  }
  return p;
}

void save_profile(const ClassProfile& p, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = kProfileFormat;
  j["version"] = kProfileVersion;
  j["label"] = p.label;
  j["tau"] = p.tau;
  j["columns"] = layout::kRowBits;
  j["marginals"] = p.marginals;
  j["allowed"] = p.mask.allowed;
  nlohmann::json frozen = nlohmann::json::object();
  for (auto [col, v] : p.mask.frozen) frozen[std::to_string(col)] = int(v);
  j["frozen"] = frozen;
  j["rows"] = {{"tcp", p.rows_tcp}, {"udp", p.rows_udp}, {"icmp", p.rows_icmp}};
  j["length_rows"] = p.length_rows;
  j["inter_arrival_us"] = p.inter_arrival_us;
  nlohmann::json tuples = nlohmann::json::array();
  for (const FiveTuple& t : p.tuple_samples) {
    tuples.push_back({{"src_ip", ip_to_string(t.src_ip)},
                      {"dst_ip", ip_to_string(t.dst_ip)},
                      {"src_port", t.src_port},
                      {"dst_port", t.dst_port},
                      {"protocol", t.protocol}});
  }
  j["tuples"] = tuples;

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename to " + path.string() + " failed: " + ec.message());
}

ClassProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": invalid JSON: " + e.what());
  }
  try {
    if (j.at("format") != kProfileFormat) {
      throw FormatError(path.string() + ": not a profile document");
    }
    if (j.at("version") != kProfileVersion) {
      throw FormatError(path.string() + ": unsupported profile version");
    }
    if (j.at("columns") != layout::kRowBits) {
      throw FormatError(path.string() + ": wrong column count");
    }
    ClassProfile p;
    p.label = j.at("label");
    p.tau = j.at("tau");
    auto marg = j.at("marginals").get<std::vector<double>>();
    auto allowed = j.at("allowed").get<std::vector<int>>();
    if (marg.size() != layout::kRowBits || allowed.size() != layout::kRowBits) {
      throw FormatError(path.string() + ": column array size mismatch");
    }
    for (int col = 0; col < layout::kRowBits; ++col) {
      if (marg[col] < 0.0 || marg[col] > 1.0) {
        throw FormatError(path.string() + ": marginal out of [0,1]");
      }
      p.marginals[col] = marg[col];
      p.mask.allowed[col] = allowed[col] ? 1 : 0;
    }
    for (auto& [key, val] : j.at("frozen").items()) {
      int col = std::stoi(key);
      int v = val.get<int>();
      if (col < 0 || col >= layout::kRowBits || (v != 0 && v != 1)) {
        throw FormatError(path.string() + ": bad frozen entry");
      }
      p.mask.frozen[col] = static_cast<Trit>(v);
    }
    p.rows_tcp = j.at("rows").at("tcp");
    p.rows_udp = j.at("rows").at("udp");
    p.rows_icmp = j.at("rows").at("icmp");
    p.length_rows = j.at("length_rows").get<std::vector<int>>();
    p.inter_arrival_us = j.at("inter_arrival_us").get<std::vector<int64_t>>();
    for (const auto& t : j.at("tuples")) {
      FiveTuple ft;
      ft.src_ip = ip_from_string(t.at("src_ip"));
      ft.dst_ip = ip_from_string(t.at("dst_ip"));
      ft.src_port = t.at("src_port");
      ft.dst_port = t.at("dst_port");
      ft.protocol = t.at("protocol");
      p.tuple_samples.push_back(ft);
    }
    if (p.tuple_samples.empty()) {
      throw FormatError(path.string() + ": profile has no tuple samples");
    }
    if (p.length_rows.empty()) {
      throw FormatError(path.string() + ": profile has no length samples");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": missing or mistyped field: " +
                      e.what());
  }
}

}  // namespace netdiff
