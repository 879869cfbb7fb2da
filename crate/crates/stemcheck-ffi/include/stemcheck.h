#ifndef STEMCHECK_H
#define STEMCHECK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum StemStatus {
  STEM_STATUS_OK = 0,
  STEM_STATUS_NULL_POINTER = 1,
  STEM_STATUS_SYNTAX = 2,
  STEM_STATUS_INVALID_MODEL = 3,
  STEM_STATUS_BUDGET_EXCEEDED = 4,
  STEM_STATUS_ENGINE = 5,
  STEM_STATUS_PANIC = 6,
} StemStatus;

typedef struct StemModel StemModel;

typedef struct StemObligations StemObligations;

typedef struct StemReport StemReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *stem_last_error(void);

// Parses a model document (UTF-8 JSON, nul-terminated).
//
// # Safety
// `json` must be a valid C string and `out` a writable pointer.
enum StemStatus stem_model_parse(const char *json, struct StemModel **out);

// Number of tasks in the model, start and end included; 0 for null.
//
// # Safety
// `model` must be null or a live handle.
size_t stem_model_task_count(const struct StemModel *model);

// # Safety
// `model` must be null or a handle not yet freed.
void stem_model_free(struct StemModel *model);

// Parses an obligation framework (JSON array).
//
// # Safety
// `json` must be a valid C string and `out` a writable pointer.
enum StemStatus stem_obligations_parse(const char *json, struct StemObligations **out);

// # Safety
// `obs` must be null or a live handle.
size_t stem_obligations_len(const struct StemObligations *obs);

// # Safety
// `obs` must be null or a handle not yet freed.
void stem_obligations_free(struct StemObligations *obs);

// Decides full compliance with the stem engine.
//
// # Safety
// `model` and `obs` must be live handles and `out` a writable pointer.
enum StemStatus stem_check(const struct StemModel *model,
                           const struct StemObligations *obs,
                           bool early_exit,
                           struct StemReport **out);

// Classifies compliance by enumerating at most `budget` executions.
//
// # Safety
// `model` and `obs` must be live handles and `out` a writable pointer.
enum StemStatus stem_oracle(const struct StemModel *model,
                            const struct StemObligations *obs,
                            size_t budget,
                            struct StemReport **out);

// 1 when fully compliant, 0 when not, -1 for a null handle.
//
// # Safety
// `report` must be null or a live handle.
int32_t stem_report_fully_compliant(const struct StemReport *report);

// The report as a JSON document. Release with `stem_string_free`.
//
// # Safety
// `report` must be null or a live handle.
char *stem_report_json(const struct StemReport *report);

// # Safety
// `report` must be null or a handle not yet freed.
void stem_report_free(struct StemReport *report);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void stem_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STEMCHECK_H */
