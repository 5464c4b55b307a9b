/*
 * netdiffusion C API: raw traffic <-> tri-valued image conversion, class
 * profiling, mask-constrained generation, protocol-compliance repair,
 * compliance validation, similarity scoring, and traffic reporting.
 *
 * All functions return ND_OK (0) on success. On failure they return a
 * nonzero status and leave a message retrievable with nd_last_error()
 * (thread local). Objects returned through out-parameters are owned by
 * the caller and released with the matching *_free function. Strings
 * returned through char** out-parameters are released with
 * nd_string_free().
 */

#ifndef NETDIFFUSION_H
#define NETDIFFUSION_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nd_status {
  ND_OK = 0,
  ND_ERR_ARGUMENT = 1, /* invalid argument / null handle */
  ND_ERR_IO = 2,       /* file could not be opened/read/written */
  ND_ERR_FORMAT = 3,   /* input is not in the expected file format */
  ND_ERR_DATA = 4,     /* well-formed input with invalid content */
  ND_ERR_INTERNAL = 5
} nd_status;

typedef struct nd_capture nd_capture;  /* parsed packet list */
typedef struct nd_matrix nd_matrix;    /* 1024x1088 tri-valued matrix */
typedef struct nd_profile nd_profile;  /* per-class generation profile */
typedef struct nd_profile_builder nd_profile_builder;
typedef struct nd_corpus nd_corpus;    /* flow set for comparison */

const char* nd_version(void);
/* Message for the most recent failure on this thread ("" if none). */
const char* nd_last_error(void);
void nd_string_free(char* s);

/* ---- packet captures ------------------------------------------------ */

nd_status nd_capture_open(const char* pcap_path, nd_capture** out);
nd_status nd_capture_write(const nd_capture* c, const char* pcap_path);
size_t nd_capture_packet_count(const nd_capture* c);
size_t nd_capture_flow_count(const nd_capture* c);
void nd_capture_free(nd_capture* c);

/* ---- matrix <-> capture, matrix <-> image --------------------------- */

/* Encodes flow `flow_index` (flows ordered by first-packet time). */
nd_status nd_capture_encode_flow(const nd_capture* c, size_t flow_index,
                                 nd_matrix** out);
/* Decodes non-padding rows back to packets; timestamps are 0. */
nd_status nd_matrix_decode(const nd_matrix* m, nd_capture** out);
nd_status nd_matrix_write_image(const nd_matrix* m, const char* png_path);
/* strict != 0 requires exactly canonical pixel colors; strict == 0 snaps
 * each pixel to the nearest canonical color (generator noise). */
nd_status nd_matrix_read_image(const char* png_path, int strict,
                               nd_matrix** out);
int nd_matrix_rows(const nd_matrix* m);
void nd_matrix_free(nd_matrix* m);

/* ---- class profiles -------------------------------------------------- */

nd_status nd_profile_builder_new(const char* label, double tau,
                                 nd_profile_builder** out);
/* Adds every flow in the capture to the class. */
nd_status nd_profile_builder_add_pcap(nd_profile_builder* b,
                                      const char* pcap_path);
nd_status nd_profile_builder_finish(nd_profile_builder* b, nd_profile** out);
void nd_profile_builder_free(nd_profile_builder* b);

nd_status nd_profile_save(const nd_profile* p, const char* json_path);
nd_status nd_profile_load(const char* json_path, nd_profile** out);
void nd_profile_free(nd_profile* p);

/* ---- generation / repair / validation ------------------------------- */

/* Deterministic for a given (profile, seed). */
nd_status nd_generate(const nd_profile* p, uint64_t seed, nd_matrix** out);

/* Full repair chain (intra rules, inter rules, checksums, timestamps).
 * Either out-parameter may be NULL. The report is a JSON document with
 * the repaired fraction, dropped rows and recorded violations. */
nd_status nd_repair(const nd_matrix* m, const nd_profile* p, uint64_t seed,
                    nd_capture** out_capture, char** out_report_json);

/* Compliance report over each flow of the capture (JSON). */
nd_status nd_validate(const nd_capture* c, char** out_report_json);

/* Traffic-analysis report over the whole capture (JSON). */
nd_status nd_traffic_report(const nd_capture* c, char** out_json);
/* Aligned text table from one or two report JSON documents
 * (second may be NULL). */
nd_status nd_traffic_report_table(const char* json_a, const char* json_b,
                                  char** out_text);

/* ---- similarity ------------------------------------------------------ */

nd_status nd_corpus_new(nd_corpus** out);
nd_status nd_corpus_add_pcap(nd_corpus* c, const char* pcap_path);
size_t nd_corpus_flow_count(const nd_corpus* c);
void nd_corpus_free(nd_corpus* c);

/* per_bit != 0 scores the 1088 columns; otherwise decoded header fields.
 * out_table may be NULL. */
nd_status nd_compare(const nd_corpus* real, const nd_corpus* synth,
                     int per_bit, char** out_json, char** out_table);

#ifdef __cplusplus
}
#endif

#endif /* NETDIFFUSION_H */
