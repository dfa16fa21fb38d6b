// Copyright 2026 The fogdna Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the fogdna pipeline. Every call that can fail returns a
 * fogdna_status and leaves a message in its context; strings returned by the
 * library stay valid until the next call on the same context. */

#ifndef FOGDNA_FOGDNA_H
#define FOGDNA_FOGDNA_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(FOGDNA_BUILDING)
#define FOGDNA_API __declspec(dllexport)
#else
#define FOGDNA_API __declspec(dllimport)
#endif
#else
#define FOGDNA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fogdna_status {
    FOGDNA_OK = 0,
    FOGDNA_ERR_DOMAIN = 1,   /* the data violates a contract (TooFewPoints, CorruptDb, ...) */
    FOGDNA_ERR_USAGE = 2,    /* bad arguments or configuration */
    FOGDNA_ERR_IO = 3,       /* file could not be read or written */
    FOGDNA_ERR_INTERNAL = 4
} fogdna_status;

typedef struct fogdna_context fogdna_context;
typedef struct fogdna_model fogdna_model;
typedef struct fogdna_fingerprint_db fogdna_fingerprint_db;

FOGDNA_API const char* fogdna_version(void);

FOGDNA_API fogdna_context* fogdna_context_new(void);
FOGDNA_API void fogdna_context_free(fogdna_context* ctx);

/* Message and error kind name ("TooFewPoints", ...) of the last failure, or "". */
FOGDNA_API const char* fogdna_last_error(const fogdna_context* ctx);
FOGDNA_API const char* fogdna_last_error_kind(const fogdna_context* ctx);
/* Data the last call produced for standard output, or "". */
FOGDNA_API const char* fogdna_last_output(const fogdna_context* ctx);
/* Newline-separated progress and warning lines from the last call. */
FOGDNA_API const char* fogdna_last_diagnostics(const fogdna_context* ctx);

/* Runs one subcommand (gen, train, detect, mine, diagnose, fogsim, eval,
 * report). config_path names a JSON config file and may be NULL;
 * overrides_json is a JSON object merged over it and may be NULL. */
FOGDNA_API fogdna_status fogdna_run(fogdna_context* ctx, const char* command, const char* config_path,
                                    const char* overrides_json);

FOGDNA_API fogdna_status fogdna_model_load(fogdna_context* ctx, const char* path, fogdna_model** out);
FOGDNA_API fogdna_status fogdna_model_save(fogdna_context* ctx, const fogdna_model* model, const char* path);
FOGDNA_API void fogdna_model_free(fogdna_model* model);
FOGDNA_API size_t fogdna_model_key_count(const fogdna_model* model);
/* 1 when both models are field-identical. */
FOGDNA_API int fogdna_model_equal(const fogdna_model* a, const fogdna_model* b);
FOGDNA_API fogdna_status fogdna_model_merge(fogdna_context* ctx, const fogdna_model* const* models, size_t count,
                                            fogdna_model** out);
/* direction: 1 up, -1 down, 0 none. flagged uses the model's tau. */
FOGDNA_API fogdna_status fogdna_model_score(fogdna_context* ctx, const fogdna_model* model, const char* cell_id,
                                            const char* metric, int hour, double value, double* score,
                                            int* direction, int* flagged);

FOGDNA_API fogdna_status fogdna_db_load(fogdna_context* ctx, const char* path, fogdna_fingerprint_db** out);
FOGDNA_API void fogdna_db_free(fogdna_fingerprint_db* db);
FOGDNA_API size_t fogdna_db_rule_count(const fogdna_fingerprint_db* db);
/* symptoms_json is an array like ["rtt_ms=HIGH"]; the diagnosis JSON is
 * left in fogdna_last_output. */
FOGDNA_API fogdna_status fogdna_db_diagnose(fogdna_context* ctx, const fogdna_fingerprint_db* db,
                                            const char* symptoms_json, const char* consequent, size_t k,
                                            double match_threshold);

FOGDNA_API fogdna_status fogdna_jaccard_distance(fogdna_context* ctx, const char* a_json, const char* b_json,
                                                 double* out);

#ifdef __cplusplus
}
#endif

#endif
