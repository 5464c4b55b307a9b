#include "netdiffusion.h"

#include <cstring>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "netdiffusion/image_codec.hpp"
#include "netdiffusion/metrics.hpp"
#include "netdiffusion/pcap_io.hpp"
#include "netdiffusion/profile.hpp"
#include "netdiffusion/repair.hpp"
#include "netdiffusion/traffic_report.hpp"

using namespace netdiff;

struct nd_capture {
  std::vector<Packet> packets;
};
struct nd_matrix {
  NprintMatrix m;
};
struct nd_profile {
  ClassProfile p;
};
struct nd_profile_builder {
  std::string label;
  double tau = 0.01;
  std::vector<FlowTrace> flows;
};
struct nd_corpus {
  std::vector<FlowTrace> flows;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
nd_status wrap(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return ND_OK;
  } catch (const IoError& e) {
    set_error(e.what());
    return ND_ERR_IO;
  } catch (const FormatError& e) {
    set_error(e.what());
    return ND_ERR_FORMAT;
  } catch (const DataError& e) {
    set_error(e.what());
    return ND_ERR_DATA;
  } catch (const std::exception& e) {
    set_error(e.what());
    return ND_ERR_INTERNAL;
  }
}

nd_status arg_error(const char* msg) {
  set_error(msg);
  return ND_ERR_ARGUMENT;
}

}  // namespace

extern "C" {

const char* nd_version(void) { return "0.1.0"; }

const char* nd_last_error(void) { return g_last_error.c_str(); }

void nd_string_free(char* s) { std::free(s); }

nd_status nd_capture_open(const char* pcap_path, nd_capture** out) {
  if (!pcap_path || !out) return arg_error("nd_capture_open: null argument");
  return wrap([&] {
    auto c = std::make_unique<nd_capture>();
    c->packets = read_pcap(pcap_path);
    *out = c.release();
  });
}

nd_status nd_capture_write(const nd_capture* c, const char* pcap_path) {
  if (!c || !pcap_path) return arg_error("nd_capture_write: null argument");
  return wrap([&] { write_pcap(c->packets, pcap_path); });
}

size_t nd_capture_packet_count(const nd_capture* c) {
  return c ? c->packets.size() : 0;
}

size_t nd_capture_flow_count(const nd_capture* c) {
  return c ? split_flows(c->packets).size() : 0;
}

void nd_capture_free(nd_capture* c) { delete c; }

nd_status nd_capture_encode_flow(const nd_capture* c, size_t flow_index,
                                 nd_matrix** out) {
  if (!c || !out) return arg_error("nd_capture_encode_flow: null argument");
  return wrap([&] {
    auto flows = split_flows(c->packets);
    if (flow_index >= flows.size()) {
      throw DataError("flow index " + std::to_string(flow_index) +
                      " out of range (capture has " +
                      std::to_string(flows.size()) + " flows)");
    }
    auto m = std::make_unique<nd_matrix>();
    m->m = encode_flow(flows[flow_index]);
    *out = m.release();
  });
}

nd_status nd_matrix_decode(const nd_matrix* m, nd_capture** out) {
  if (!m || !out) return arg_error("nd_matrix_decode: null argument");
  return wrap([&] {
    auto c = std::make_unique<nd_capture>();
    c->packets = decode_flow(m->m).packets;
    *out = c.release();
  });
}

nd_status nd_matrix_write_image(const nd_matrix* m, const char* png_path) {
  if (!m || !png_path) return arg_error("nd_matrix_write_image: null argument");
  return wrap([&] { matrix_to_image(m->m, png_path); });
}

nd_status nd_matrix_read_image(const char* png_path, int strict,
                               nd_matrix** out) {
  if (!png_path || !out) return arg_error("nd_matrix_read_image: null argument");
  return wrap([&] {
    auto m = std::make_unique<nd_matrix>();
    m->m = image_to_matrix(png_path, strict != 0);
    *out = m.release();
  });
}

int nd_matrix_rows(const nd_matrix* m) { return m ? m->m.n_real : 0; }

void nd_matrix_free(nd_matrix* m) { delete m; }

nd_status nd_profile_builder_new(const char* label, double tau,
                                 nd_profile_builder** out) {
  if (!label || !out) return arg_error("nd_profile_builder_new: null argument");
  if (tau < 0.0 || tau > 1.0) {
    return arg_error("nd_profile_builder_new: tau outside [0,1]");
  }
  auto b = std::make_unique<nd_profile_builder>();
  b->label = label;
  b->tau = tau;
  *out = b.release();
  g_last_error.clear();
  return ND_OK;
}

nd_status nd_profile_builder_add_pcap(nd_profile_builder* b,
                                      const char* pcap_path) {
  if (!b || !pcap_path) {
    return arg_error("nd_profile_builder_add_pcap: null argument");
  }
  return wrap([&] {
    auto packets = read_pcap(pcap_path);
    for (FlowTrace& f : split_flows(packets)) {
      f.label = b->label;
      b->flows.push_back(std::move(f));
    }
  });
}

nd_status nd_profile_builder_finish(nd_profile_builder* b, nd_profile** out) {
  if (!b || !out) return arg_error("nd_profile_builder_finish: null argument");
  return wrap([&] {
    auto p = std::make_unique<nd_profile>();
    p->p = build_class_profile(b->flows, b->label, b->tau);
    *out = p.release();
  });
}

void nd_profile_builder_free(nd_profile_builder* b) { delete b; }

nd_status nd_profile_save(const nd_profile* p, const char* json_path) {
  if (!p || !json_path) return arg_error("nd_profile_save: null argument");
  return wrap([&] { save_profile(p->p, json_path); });
}

nd_status nd_profile_load(const char* json_path, nd_profile** out) {
  if (!json_path || !out) return arg_error("nd_profile_load: null argument");
  return wrap([&] {
    auto p = std::make_unique<nd_profile>();
    p->p = load_profile(json_path);
    *out = p.release();
  });
}

void nd_profile_free(nd_profile* p) { delete p; }

nd_status nd_generate(const nd_profile* p, uint64_t seed, nd_matrix** out) {
  if (!p || !out) return arg_error("nd_generate: null argument");
  return wrap([&] {
    auto m = std::make_unique<nd_matrix>();
    m->m = generate(p->p, seed);
    *out = m.release();
  });
}

nd_status nd_repair(const nd_matrix* m, const nd_profile* p, uint64_t seed,
                    nd_capture** out_capture, char** out_report_json) {
  if (!m || !p) return arg_error("nd_repair: null argument");
  return wrap([&] {
    RepairedFlow repaired = repair_pipeline(m->m, p->p, seed);
    if (out_capture) {
      auto c = std::make_unique<nd_capture>();
      c->packets = std::move(repaired.flow.packets);
      *out_capture = c.release();
    }
    if (out_report_json) {
      *out_report_json = dup_string(repaired.report.to_json());
    }
  });
}

nd_status nd_validate(const nd_capture* c, char** out_report_json) {
  if (!c || !out_report_json) return arg_error("nd_validate: null argument");
  return wrap([&] {
    nlohmann::json flows_json = nlohmann::json::array();
    bool compliant = true;
    int total_violations = 0;
    auto flows = split_flows(c->packets);
    for (size_t i = 0; i < flows.size(); ++i) {
      ComplianceReport rep = validate(flows[i]);
      compliant = compliant && rep.compliant();
      total_violations += static_cast<int>(rep.violations.size());
      nlohmann::json fj = nlohmann::json::parse(rep.to_json());
      fj["flow"] = i;
      flows_json.push_back(std::move(fj));
    }
    nlohmann::json j;
    j["packets"] = c->packets.size();
    j["flows"] = flows_json;
    j["compliant"] = compliant;
    j["total_violations"] = total_violations;
    *out_report_json = dup_string(j.dump(2));
  });
}

nd_status nd_traffic_report(const nd_capture* c, char** out_json) {
  if (!c || !out_json) return arg_error("nd_traffic_report: null argument");
  return wrap([&] {
    *out_json = dup_string(build_report(c->packets).to_json());
  });
}

nd_status nd_traffic_report_table(const char* json_a, const char* json_b,
                                  char** out_text) {
  if (!json_a || !out_text) {
    return arg_error("nd_traffic_report_table: null argument");
  }
  return wrap([&] {
    auto parse = [](const char* text) {
      nlohmann::json j = nlohmann::json::parse(text);
      TrafficReport r;
      r.packet_count = j.at("packet_count");
      r.byte_count = j.at("byte_count");
      r.avg_tcp_window = j.at("avg_tcp_window");
      r.proto_tcp = j.at("protocol_distribution").at("tcp");
      r.proto_udp = j.at("protocol_distribution").at("udp");
      r.proto_icmp = j.at("protocol_distribution").at("icmp");
      r.proto_other = j.at("protocol_distribution").at("other");
      r.flag_syn = j.at("flags_distribution").at("syn");
      r.flag_ack = j.at("flags_distribution").at("ack");
      r.flag_fin = j.at("flags_distribution").at("fin");
      r.flag_rst = j.at("flags_distribution").at("rst");
      r.flag_psh = j.at("flags_distribution").at("psh");
      r.flag_urg = j.at("flags_distribution").at("urg");
      for (auto& [k, v] : j.at("src_port_distribution").items()) {
        r.src_ports[static_cast<uint16_t>(std::stoi(k))] = v;
      }
      for (auto& [k, v] : j.at("dst_port_distribution").items()) {
        r.dst_ports[static_cast<uint16_t>(std::stoi(k))] = v;
      }
      const auto& bins = j.at("packet_size_distribution");
      r.size_bins = {bins.at("0-499"), bins.at("500-999"),
                     bins.at("1000-1499"), bins.at("1500-1999"),
                     bins.at("2000+")};
      for (auto& [k, v] : j.at("src_ip_distribution").items()) {
        r.src_ips[ip_from_string(k)] = v;
      }
      for (auto& [k, v] : j.at("dst_ip_distribution").items()) {
        r.dst_ips[ip_from_string(k)] = v;
      }
      r.avg_ttl = j.at("avg_ttl");
      r.sessions = j.at("sessions");
      r.checksum_errors = j.at("checksum_errors");
      r.fragmented_packets = j.at("fragmented_packets");
      r.fragmented_datagrams = j.at("fragmented_datagrams");
      return r;
    };
    TrafficReport a = parse(json_a);
    if (json_b) {
      TrafficReport b = parse(json_b);
      *out_text = dup_string(report_table(a, &b));
    } else {
      *out_text = dup_string(report_table(a, nullptr));
    }
  });
}

nd_status nd_corpus_new(nd_corpus** out) {
  if (!out) return arg_error("nd_corpus_new: null argument");
  *out = new nd_corpus();
  g_last_error.clear();
  return ND_OK;
}

nd_status nd_corpus_add_pcap(nd_corpus* c, const char* pcap_path) {
  if (!c || !pcap_path) return arg_error("nd_corpus_add_pcap: null argument");
  return wrap([&] {
    auto packets = read_pcap(pcap_path);
    for (FlowTrace& f : split_flows(packets)) {
      c->flows.push_back(std::move(f));
    }
  });
}

size_t nd_corpus_flow_count(const nd_corpus* c) {
  return c ? c->flows.size() : 0;
}

void nd_corpus_free(nd_corpus* c) { delete c; }

nd_status nd_compare(const nd_corpus* real, const nd_corpus* synth,
                     int per_bit, char** out_json, char** out_table) {
  if (!real || !synth || !out_json) {
    return arg_error("nd_compare: null argument");
  }
  return wrap([&] {
    SimilarityReport rep =
        compare_flows(real->flows, synth->flows, per_bit != 0);
    *out_json = dup_string(rep.to_json());
    if (out_table) *out_table = dup_string(rep.to_table());
  });
}

}  // extern "C"
