#ifndef BPNET_H
#define BPNET_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BpnetFormat {
  BpnetFormat_Dot = 0,
  BpnetFormat_Json = 1,
} BpnetFormat;

typedef enum BpnetStatus {
  BpnetStatus_Ok = 0,
  BpnetStatus_NullArgument = 1,
  BpnetStatus_InvalidUtf8 = 2,
  BpnetStatus_ParseError = 3,
  BpnetStatus_GuardExceeded = 4,
  BpnetStatus_InvalidModel = 5,
  BpnetStatus_Panic = 6,
} BpnetStatus;

/**
 * Opaque state-graph handle.
 */
typedef struct BpnetLts BpnetLts;

/**
 * Opaque model handle.
 */
typedef struct BpnetModel BpnetModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Borrowed; do not free.
 */
const char *bpnet_last_error(void);

/**
 * Builds a model from a reference such as `lc:bp:original:2,faults`.
 *
 * # Safety
 * `reference` must be a valid C string and `out` a writable pointer.
 */
enum BpnetStatus bpnet_model_from_ref(const char *reference, struct BpnetModel **out);

/**
 * Parses a net from its JSON form.
 *
 * # Safety
 * `json` must be a valid C string and `out` a writable pointer.
 */
enum BpnetStatus bpnet_model_from_pn_json(const char *json, struct BpnetModel **out);

/**
 * # Safety
 * `model` must come from a `bpnet_model_from_*` call, or be null.
 */
void bpnet_model_free(struct BpnetModel *model);

/**
 * Explores the reachable state graph. Zero limits select the defaults.
 *
 * # Safety
 * `model` must be a live handle and `out` a writable pointer.
 */
enum BpnetStatus bpnet_model_build_lts(const struct BpnetModel *model,
                                       uint64_t max_states,
                                       uint64_t max_tokens,
                                       struct BpnetLts **out);

/**
 * Removes the model's helper events from `lts`, producing a new graph.
 *
 * # Safety
 * `model` and `lts` must be live handles and `out` a writable pointer.
 */
enum BpnetStatus bpnet_lts_reduce_helper(const struct BpnetModel *model,
                                         const struct BpnetLts *lts,
                                         struct BpnetLts **out);

/**
 * # Safety
 * `lts` must be a live handle or null (which yields 0).
 */
uintptr_t bpnet_lts_num_states(const struct BpnetLts *lts);

/**
 * # Safety
 * `lts` must be a live handle or null (which yields 0).
 */
uintptr_t bpnet_lts_num_transitions(const struct BpnetLts *lts);

/**
 * Renders the graph; release the string with `bpnet_string_free`.
 *
 * # Safety
 * `lts` must be a live handle and `out` a writable pointer.
 */
enum BpnetStatus bpnet_lts_export(const struct BpnetLts *lts, enum BpnetFormat format, char **out);

/**
 * # Safety
 * `lts` must come from this library, or be null.
 */
void bpnet_lts_free(struct BpnetLts *lts);

/**
 * Compares two graphs on their shared non-helper events and writes the JSON
 * report to `out` (free with `bpnet_string_free`).
 *
 * # Safety
 * All handles must be live and `out` a writable pointer.
 */
enum BpnetStatus bpnet_compare(const struct BpnetModel *left_model,
                               const struct BpnetLts *left,
                               const struct BpnetModel *right_model,
                               const struct BpnetLts *right,
                               char **out);

/**
 * # Safety
 * `s` must be a string returned by this library, or null.
 */
void bpnet_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BPNET_H */
