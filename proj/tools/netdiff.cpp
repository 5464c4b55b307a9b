// netdiff: command-line front end over the netdiffusion C API.
//
// Subcommands: encode, decode, profile, generate, repair, compare,
// report, validate. Exit codes: 0 success, 1 usage error, 2 data error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netdiffusion.h"

namespace fs = std::filesystem;

namespace {

struct StringFree {
  void operator()(char* s) const { nd_string_free(s); }
};
using CString = std::unique_ptr<char, StringFree>;

[[noreturn]] void fail(const std::string& context) {
  std::cerr << "netdiff: " << context;
  const char* detail = nd_last_error();
  if (detail && *detail) std::cerr << ": " << detail;
  std::cerr << '\n';
  std::exit(2);
}

void check(nd_status st, const std::string& context) {
  if (st != ND_OK) fail(context);
}

// Atomic text write: temp file then rename.
void write_text(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) fail("cannot open " + tmp.string() + " for writing");
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
    if (!out) fail("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail("rename to " + path.string() + " failed: " + ec.message());
}

std::vector<fs::path> pcaps_in_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pcap") {
      files.push_back(entry.path());
    }
  }
  if (ec) fail("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  return files;
}

struct CaptureFree {
  void operator()(nd_capture* c) const { nd_capture_free(c); }
};
struct MatrixFree {
  void operator()(nd_matrix* m) const { nd_matrix_free(m); }
};
struct ProfileFree {
  void operator()(nd_profile* p) const { nd_profile_free(p); }
};
struct CorpusFree {
  void operator()(nd_corpus* c) const { nd_corpus_free(c); }
};
using Capture = std::unique_ptr<nd_capture, CaptureFree>;
using Matrix = std::unique_ptr<nd_matrix, MatrixFree>;
using Profile = std::unique_ptr<nd_profile, ProfileFree>;
using Corpus = std::unique_ptr<nd_corpus, CorpusFree>;

Capture open_capture(const std::string& path) {
  nd_capture* c = nullptr;
  check(nd_capture_open(path.c_str(), &c), "reading " + path);
  return Capture(c);
}

Profile open_profile(const std::string& path) {
  nd_profile* p = nullptr;
  check(nd_profile_load(path.c_str(), &p), "loading profile " + path);
  return Profile(p);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tri-valued traffic images: encode, generate, repair, score"};
  app.require_subcommand(1);

  // encode
  std::string enc_pcap, enc_image;
  size_t enc_flow = 0;
  auto* enc = app.add_subcommand("encode", "Convert a pcap flow to a PNG image");
  enc->add_option("pcap", enc_pcap, "Input pcap")->required();
  enc->add_option("image", enc_image, "Output PNG")->required();
  enc->add_option("--flow", enc_flow, "Flow index (by first-packet time)")
      ->capture_default_str();

  // decode
  std::string dec_image, dec_pcap;
  bool dec_lenient = false;
  auto* dec = app.add_subcommand("decode", "Convert a PNG image back to a pcap");
  dec->add_option("image", dec_image, "Input PNG")->required();
  dec->add_option("pcap", dec_pcap, "Output pcap")->required();
  dec->add_flag("--lenient", dec_lenient,
                "Snap noisy pixels to the nearest canonical color");

  // profile
  std::string prof_dir, prof_out, prof_label = "class-0";
  double prof_tau = 0.01;
  auto* prof = app.add_subcommand("profile", "Learn a class profile from pcaps");
  prof->add_option("dir", prof_dir, "Directory of .pcap files")->required();
  prof->add_option("out", prof_out, "Output profile JSON")->required();
  prof->add_option("--label", prof_label, "Class label")->capture_default_str();
  prof->add_option("--tau", prof_tau, "Column population threshold")
      ->capture_default_str();

  // generate
  std::string gen_profile, gen_dir;
  uint64_t gen_seed = 0;
  size_t gen_count = 1;
  auto* gen = app.add_subcommand("generate", "Sample matrices as PNG images");
  gen->add_option("profile", gen_profile, "Profile JSON")->required();
  gen->add_option("dir", gen_dir, "Output directory")->required();
  gen->add_option("--count", gen_count, "Number of images")
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "Base seed (image i uses seed+i)")
      ->envname("NETDIFF_SEED")
      ->capture_default_str();

  // repair
  std::string rep_image, rep_profile, rep_pcap, rep_report;
  uint64_t rep_seed = 0;
  bool rep_lenient = false;
  double rep_max_fraction = 0.15;
  auto* rep = app.add_subcommand(
      "repair", "Repair a generated image into a compliant pcap");
  rep->add_option("image", rep_image, "Input PNG")->required();
  rep->add_option("profile", rep_profile, "Profile JSON")->required();
  rep->add_option("pcap", rep_pcap, "Output pcap")->required();
  rep->add_option("--report", rep_report, "Output report JSON");
  rep->add_option("--seed", rep_seed, "Seed for ISN/ID/timestamp draws")
      ->envname("NETDIFF_SEED")
      ->capture_default_str();
  rep->add_flag("--lenient", rep_lenient,
                "Snap noisy pixels to the nearest canonical color");
  rep->add_option("--max-repair-fraction", rep_max_fraction,
                  "Warn when the repaired trit fraction exceeds this bound")
      ->capture_default_str();

  // compare
  std::string cmp_real, cmp_synth, cmp_out;
  bool cmp_per_bit = false;
  std::string cmp_field;
  auto* cmp = app.add_subcommand(
      "compare", "Score real-vs-synthetic similarity (JSD/TVD/HD)");
  cmp->add_option("real", cmp_real, "Directory of real .pcap files")->required();
  cmp->add_option("synth", cmp_synth, "Directory of synthetic .pcap files")
      ->required();
  cmp->add_option("out", cmp_out, "Output report JSON")->required();
  cmp->add_flag("--per-bit", cmp_per_bit,
                "Score matrix columns instead of decoded fields");
  cmp->add_option("--field", cmp_field,
                  "Print one field's scores (e.g. ipv4.protocol)");

  // report
  std::string tr_pcap, tr_out, tr_also;
  auto* tr = app.add_subcommand("report", "Traffic-analysis report for a pcap");
  tr->add_option("pcap", tr_pcap, "Input pcap")->required();
  tr->add_option("out", tr_out, "Output report JSON")->required();
  tr->add_option("--also", tr_also,
                 "Second pcap: print a side-by-side table");

  // validate
  std::string val_pcap, val_out;
  auto* val = app.add_subcommand(
      "validate", "Protocol-compliance report for a pcap");
  val->add_option("pcap", val_pcap, "Input pcap")->required();
  val->add_option("out", val_out, "Output report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (enc->parsed()) {
    Capture c = open_capture(enc_pcap);
    nd_matrix* m = nullptr;
    check(nd_capture_encode_flow(c.get(), enc_flow, &m),
          "encoding flow " + std::to_string(enc_flow) + " of " + enc_pcap);
    Matrix mat(m);
    check(nd_matrix_write_image(mat.get(), enc_image.c_str()),
          "writing " + enc_image);
    std::cout << "encoded flow " << enc_flow << " (" << nd_matrix_rows(mat.get())
              << " packets) -> " << enc_image << '\n';
  } else if (dec->parsed()) {
    nd_matrix* m = nullptr;
    check(nd_matrix_read_image(dec_image.c_str(), dec_lenient ? 0 : 1, &m),
          "reading " + dec_image);
    Matrix mat(m);
    nd_capture* c = nullptr;
    check(nd_matrix_decode(mat.get(), &c), "decoding " + dec_image);
    Capture cap(c);
    check(nd_capture_write(cap.get(), dec_pcap.c_str()), "writing " + dec_pcap);
    std::cout << "decoded " << nd_capture_packet_count(cap.get())
              << " packets -> " << dec_pcap << '\n';
  } else if (prof->parsed()) {
    auto files = pcaps_in_dir(prof_dir);
    if (files.empty()) fail("no .pcap files in " + prof_dir);
    nd_profile_builder* b = nullptr;
    check(nd_profile_builder_new(prof_label.c_str(), prof_tau, &b),
          "creating profile builder");
    for (const fs::path& f : files) {
      if (nd_profile_builder_add_pcap(b, f.c_str()) != ND_OK) {
        nd_profile_builder_free(b);
        fail("adding " + f.string());
      }
    }
    nd_profile* p = nullptr;
    nd_status st = nd_profile_builder_finish(b, &p);
    nd_profile_builder_free(b);
    check(st, "building profile");
    Profile profile(p);
    check(nd_profile_save(profile.get(), prof_out.c_str()),
          "writing " + prof_out);
    std::cout << "profiled " << files.size() << " captures -> " << prof_out
              << '\n';
  } else if (gen->parsed()) {
    Profile p = open_profile(gen_profile);
    std::error_code ec;
    fs::create_directories(gen_dir, ec);
    if (ec) fail("cannot create " + gen_dir + ": " + ec.message());
    for (size_t i = 0; i < gen_count; ++i) {
      nd_matrix* m = nullptr;
      check(nd_generate(p.get(), gen_seed + i, &m), "generating image");
      Matrix mat(m);
      char name[32];
      std::snprintf(name, sizeof name, "synth_%05zu.png", i);
      fs::path out = fs::path(gen_dir) / name;
      check(nd_matrix_write_image(mat.get(), out.c_str()),
            "writing " + out.string());
    }
    std::cout << "generated " << gen_count << " images -> " << gen_dir << '\n';
  } else if (rep->parsed()) {
    nd_matrix* m = nullptr;
    check(nd_matrix_read_image(rep_image.c_str(), rep_lenient ? 0 : 1, &m),
          "reading " + rep_image);
    Matrix mat(m);
    Profile p = open_profile(rep_profile);
    nd_capture* c = nullptr;
    char* report = nullptr;
    check(nd_repair(mat.get(), p.get(), rep_seed, &c, &report),
          "repairing " + rep_image);
    Capture cap(c);
    CString report_str(report);
    check(nd_capture_write(cap.get(), rep_pcap.c_str()), "writing " + rep_pcap);
    if (!rep_report.empty()) write_text(rep_report, report_str.get());
    // Surface the repaired fraction without forcing callers to parse JSON.
    std::string text = report_str.get();
    auto pos = text.find("\"repaired_fraction\": ");
    double fraction = 0.0;
    if (pos != std::string::npos) {
      fraction = std::stod(text.substr(pos + 21));
    }
    std::cout << "repaired " << nd_capture_packet_count(cap.get())
              << " packets -> " << rep_pcap << " (repaired fraction "
              << fraction << ")\n";
    if (fraction > rep_max_fraction) {
      std::cerr << "netdiff: warning: repaired fraction " << fraction
                << " exceeds bound " << rep_max_fraction << '\n';
    }
  } else if (cmp->parsed()) {
    auto load_corpus = [&](const std::string& dir) {
      auto files = pcaps_in_dir(dir);
      if (files.empty()) fail("no .pcap files in " + dir);
      nd_corpus* c = nullptr;
      check(nd_corpus_new(&c), "creating corpus");
      Corpus corpus(c);
      for (const fs::path& f : files) {
        check(nd_corpus_add_pcap(corpus.get(), f.c_str()),
              "adding " + f.string());
      }
      return corpus;
    };
    Corpus real = load_corpus(cmp_real);
    Corpus synth = load_corpus(cmp_synth);
    char* json = nullptr;
    char* table = nullptr;
    check(nd_compare(real.get(), synth.get(), cmp_per_bit ? 1 : 0, &json,
                     &table),
          "comparing corpora");
    CString json_str(json), table_str(table);
    write_text(cmp_out, json_str.get());
    std::cout << table_str.get();
    if (!cmp_field.empty()) {
      // Single-field view pulled out of the JSON document.
      std::string text = json_str.get();
      auto pos = text.find("\"" + cmp_field + "\"");
      if (pos == std::string::npos) {
        fail("field " + cmp_field + " not present in the report");
      }
      auto end = text.find('}', pos);
      std::cout << cmp_field << " " << text.substr(pos + cmp_field.size() + 3,
                                                   end - pos - cmp_field.size() - 2)
                << '\n';
    }
  } else if (tr->parsed()) {
    Capture c = open_capture(tr_pcap);
    char* json = nullptr;
    check(nd_traffic_report(c.get(), &json), "reporting " + tr_pcap);
    CString json_str(json);
    write_text(tr_out, json_str.get());
    char* table = nullptr;
    if (!tr_also.empty()) {
      Capture c2 = open_capture(tr_also);
      char* json2 = nullptr;
      check(nd_traffic_report(c2.get(), &json2), "reporting " + tr_also);
      CString json2_str(json2);
      check(nd_traffic_report_table(json_str.get(), json2_str.get(), &table),
            "rendering table");
    } else {
      check(nd_traffic_report_table(json_str.get(), nullptr, &table),
            "rendering table");
    }
    CString table_str(table);
    std::cout << table_str.get();
  } else if (val->parsed()) {
    Capture c = open_capture(val_pcap);
    char* json = nullptr;
    check(nd_validate(c.get(), &json), "validating " + val_pcap);
    CString json_str(json);
    write_text(val_out, json_str.get());
    std::string text = json_str.get();
    bool compliant = text.find("\"compliant\": true") != std::string::npos;
    std::cout << val_pcap << ": "
              << (compliant ? "compliant" : "violations found") << " ("
              << nd_capture_packet_count(c.get()) << " packets)\n";
  }
  return 0;
}
