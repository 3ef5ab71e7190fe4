/* C interface to the xlogo library.
 *
 * Every function returning xlogo_status leaves a message retrievable with
 * xlogo_last_error() (thread-local) on failure. Strings handed out through
 * char** parameters are heap allocated and must be released with
 * xlogo_free_string(). Handles are released with their *_free function.
 */
#ifndef XLOGO_H
#define XLOGO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define XLOGO_API __declspec(dllexport)
#else
#define XLOGO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the CLI exit codes. */
typedef enum {
    XLOGO_OK = 0,
    XLOGO_ERR_USAGE = 1,
    XLOGO_ERR_DATA = 2,
    XLOGO_ERR_EXTERNAL = 3,
    XLOGO_ERR_INTERNAL = 4
} xlogo_status;

typedef struct xlogo_dataset xlogo_dataset;
typedef struct xlogo_report xlogo_report;

XLOGO_API const char* xlogo_version(void);
XLOGO_API const char* xlogo_last_error(void);
XLOGO_API void xlogo_free_string(char* s);

/* Datasets: JSONL files of tasks, optionally with solution code. */
XLOGO_API xlogo_status xlogo_dataset_load(const char* path, xlogo_dataset** out);
XLOGO_API xlogo_status xlogo_dataset_parse(const char* text, xlogo_dataset** out);
XLOGO_API xlogo_status xlogo_dataset_save(const xlogo_dataset* ds, const char* path);
XLOGO_API size_t xlogo_dataset_size(const xlogo_dataset* ds);
XLOGO_API xlogo_status xlogo_dataset_record_json(const xlogo_dataset* ds, size_t index, char** out);
/* JSON array of load warnings (unknown fields). */
XLOGO_API xlogo_status xlogo_dataset_warnings(const xlogo_dataset* ds, char** out);
XLOGO_API xlogo_status xlogo_dataset_hash(const xlogo_dataset* ds, size_t index, char** out);
XLOGO_API void xlogo_dataset_free(xlogo_dataset* ds);

/* Runs `code` (program text) on task `index`; *out receives an outcome JSON
 * object with format/no_crash/success, crash details and the constraint report. */
XLOGO_API xlogo_status xlogo_run(const xlogo_dataset* ds, size_t index, const char* code, char** out);

/* Validates the task and the pair: parse, success, constraints, redundancy.
 * *ok is 1 when every check passes. */
XLOGO_API xlogo_status xlogo_check(const xlogo_dataset* ds, size_t index, const char* code, int* ok, char** out);

/* style is "nl" or "ascii". */
XLOGO_API xlogo_status xlogo_render_prompt(const xlogo_dataset* ds, size_t index, const char* style, char** out);

/* ops is a comma-separated subset of A, B, C. *out receives the record JSON. */
XLOGO_API xlogo_status xlogo_perturb(const xlogo_dataset* ds, size_t index, const char* ops, uint64_t seed, char** out);

typedef struct {
    const char* difficulty; /* "easy", "medium" or "hard" */
    size_t count;
    size_t per_combination_cap;
    int min_rows;
    int max_rows;
    int min_cols;
    int max_cols;
    double distractor_density;
    uint64_t seed;
    int reject_redundant;
    unsigned threads; /* 0 = hardware concurrency */
} xlogo_synth_params;

XLOGO_API void xlogo_synth_params_default(xlogo_synth_params* params);

/* Synthesizes up to params->count pairs per reference record. Pairs whose
 * hash equals any reference hash or an earlier output are dropped. */
XLOGO_API xlogo_status xlogo_synthesize(const xlogo_dataset* references, const xlogo_synth_params* params,
                                        xlogo_dataset** out, char** manifest);

/* train < 0 takes every record not assigned to val or eval. */
XLOGO_API xlogo_status xlogo_split(const xlogo_dataset* ds, long long train, size_t val, size_t eval, uint64_t seed,
                                   xlogo_dataset** train_out, xlogo_dataset** val_out, xlogo_dataset** eval_out);

/* Predictions are JSONL lines {"id", "raw_output"}. */
XLOGO_API xlogo_status xlogo_evaluate(const xlogo_dataset* ds, const char* predictions_path, unsigned threads,
                                      xlogo_report** out);
XLOGO_API xlogo_status xlogo_evaluate_text(const xlogo_dataset* ds, const char* predictions_jsonl, unsigned threads,
                                           xlogo_report** out);
XLOGO_API xlogo_status xlogo_report_rates(const xlogo_report* report, double* format, double* no_crash,
                                          double* success);
XLOGO_API xlogo_status xlogo_report_json(const xlogo_report* report, char** out);
/* dimension: task_type, code_constraints, code_concepts, code_length, grid_size.
 * Either output pointer may be NULL. */
XLOGO_API xlogo_status xlogo_report_breakdown(const xlogo_report* report, const char* dimension, char** json_out,
                                              char** table_out);
XLOGO_API void xlogo_report_free(xlogo_report* report);

typedef struct {
    double beta;
    size_t n_draws; /* 0 = number of outcomes */
    uint64_t seed;
} xlogo_resample_plan;

/* Outcomes are JSONL lines {"index", "failed"}. *indices is released with
 * xlogo_free_indices(). */
XLOGO_API xlogo_status xlogo_resample(const char* outcomes_path, const xlogo_resample_plan* plan, size_t** indices,
                                      size_t* n_indices, char** manifest);
XLOGO_API void xlogo_free_indices(size_t* indices);

typedef struct {
    const char* endpoint;
    const char* model;
    double temperature;
    int max_tokens;
    unsigned concurrency;
    int max_retries;
    int initial_backoff_ms;
    int timeout_seconds;
    const char* style; /* prompt style, "nl" or "ascii" */
} xlogo_query_config;

XLOGO_API void xlogo_query_config_default(xlogo_query_config* config);

/* Queries the endpoint for every task and writes predictions JSONL to
 * out_path. The API key is read from MODEL_API_KEY. */
XLOGO_API xlogo_status xlogo_query(const xlogo_dataset* ds, const xlogo_query_config* config, const char* out_path,
                                   char** stats);

#ifdef __cplusplus
}
#endif

#endif /* XLOGO_H */
