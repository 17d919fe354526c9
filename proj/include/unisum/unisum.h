// Copyright 2026 The unisum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UNISUM_UNISUM_H_
#define UNISUM_UNISUM_H_

/* C interface to the unisum summarizer. Every call returns a usum_status;
 * on failure usum_last_error() describes the problem (thread-local, valid
 * until the next failing call on the same thread). Strings returned through
 * char** out-parameters are owned by the caller and released with
 * usum_string_free(). Handles are released with their *_free function;
 * passing NULL to a free function is a no-op. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define USUM_API __declspec(dllexport)
#else
#define USUM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum usum_status {
  USUM_OK = 0,
  USUM_ERR_CONFIG = 1,   /* bad arguments or configuration */
  USUM_ERR_DATA = 2,     /* unreadable or inconsistent input */
  USUM_ERR_NUMERIC = 3,  /* non-finite values, off-simplex distributions */
  USUM_ERR_INTERNAL = 4
} usum_status;

typedef struct usum_corpus usum_corpus;
typedef struct usum_model usum_model;

USUM_API const char* usum_version(void);
USUM_API const char* usum_last_error(void);
USUM_API void usum_string_free(char* s);
USUM_API void usum_set_warnings(int enabled);

/* Resolves a preset ("desk" or "paper", NULL means "desk") with optional
 * JSON overrides into the full configuration and its fingerprint. */
USUM_API usum_status usum_config_resolve(const char* preset, const char* overrides_json, char** out_json,
                                         char** out_fingerprint);
/* Fingerprint of any JSON document (canonical form, keys sorted). */
USUM_API usum_status usum_fingerprint(const char* json_text, char** out_fingerprint);

/* Corpora: JSON lines of {"article": ..., "summary": ...}. */
USUM_API usum_status usum_corpus_load(const char* path, usum_corpus** out);
USUM_API usum_status usum_corpus_parse(const char* jsonl, usum_corpus** out);
/* Synthetic corpus; settings_json may be NULL for defaults. */
USUM_API usum_status usum_corpus_generate(const char* settings_json, uint64_t seed, usum_corpus** out);
USUM_API usum_status usum_corpus_save(const usum_corpus* corpus, const char* path);
USUM_API usum_status usum_corpus_size(const usum_corpus* corpus, size_t* out);
/* Records [begin, end) as a new corpus. */
USUM_API usum_status usum_corpus_slice(const usum_corpus* corpus, size_t begin, size_t end, usum_corpus** out);
USUM_API void usum_corpus_free(usum_corpus* corpus);

/* Oracle labels, one {"labels":[...]} line per record. */
USUM_API usum_status usum_make_labels(const usum_corpus* corpus, char** out_jsonl);
/* Attaches precomputed labels (same format) used by later training calls. */
USUM_API usum_status usum_corpus_set_labels(usum_corpus* corpus, const char* labels_jsonl);

/* Trains the regime named in config_json (full configuration, e.g. from
 * usum_config_resolve). valid may be NULL: the tail of train is held out.
 * init supplies vocabulary and parameters (required for two-stage and e2e),
 * abs_init optionally replaces the abstracter half. out_log (may be NULL)
 * receives a JSON training log. */
/* Called on each validation pass of usum_train with a JSON object
 * {"iteration":..,"valid":{...loss parts}}. Per thread; NULL disables. */
typedef void (*usum_progress_fn)(const char* event_json, void* user);
USUM_API void usum_set_progress(usum_progress_fn fn, void* user);

USUM_API usum_status usum_train(const char* config_json, const usum_corpus* train, const usum_corpus* valid,
                                const usum_model* init, const usum_model* abs_init, usum_model** out,
                                char** out_log);

USUM_API usum_status usum_model_load(const char* path, usum_model** out);
USUM_API usum_status usum_model_save(const usum_model* model, const char* path);
/* Configuration, dimensions, iteration counter and run record as JSON. */
USUM_API usum_status usum_model_info(const usum_model* model, char** out_json);
USUM_API void usum_model_free(usum_model* model);

/* options_json (may be NULL) overrides decoding settings: "mode"
 * (unified, two-stage, abstracter), "max_len", "beam_width",
 * "beta_threshold". */
USUM_API usum_status usum_decode(const usum_model* model, const usum_corpus* corpus, const char* options_json,
                                 char** out_text);
USUM_API usum_status usum_evaluate(const usum_model* model, const usum_corpus* corpus, const char* options_json,
                                   char** out_report);

/* Tokenizes both texts and scores them; metric is "1", "2" or "L". */
USUM_API usum_status usum_rouge(const char* candidate, const char* reference, const char* metric, char** out_json);

/* Finite-difference check of every loss on a toy model. */
USUM_API usum_status usum_gradcheck(uint64_t seed, double epsilon, double tolerance, char** out_json, int* passed);

#ifdef __cplusplus
}
#endif

#endif /* UNISUM_UNISUM_H_ */
