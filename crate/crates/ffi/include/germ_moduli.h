#ifndef GERM_MODULI_H
#define GERM_MODULI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GmCommand {
  GM_COMMAND_SEMIRING = 0,
  GM_COMMAND_NORMALIZE = 1,
  GM_COMMAND_SAITO = 2,
  GM_COMMAND_CLASSIFY = 3,
  GM_COMMAND_DIMENSION = 4,
  GM_COMMAND_ACTION = 5,
  GM_COMMAND_EQUIV = 6,
} GmCommand;

/**
 * Result codes. `GM_STATUS_UNSUPPORTED` still carries a report.
 */
typedef enum GmStatus {
  GM_STATUS_OK = 0,
  GM_STATUS_INPUT_ERROR = 1,
  GM_STATUS_UNSUPPORTED = 2,
  GM_STATUS_PRECONDITION = 3,
  GM_STATUS_TRUNCATION = 4,
  GM_STATUS_INCONSISTENT = 5,
  GM_STATUS_NULL_POINTER = 6,
  GM_STATUS_INVALID_UTF8 = 7,
  GM_STATUS_PANIC = 8,
} GmStatus;

/**
 * Opaque curve document.
 */
typedef struct GmDocument GmDocument;

/**
 * Run options. Zero `degree_bound` selects the default; `marking` may be
 * NULL; `phi` and `against` may be NULL.
 */
typedef struct GmOptions {
  uint32_t truncation;
  uint32_t degree_bound;
  uint32_t seed;
  bool reduce;
  const uint32_t *marking;
  size_t marking_len;
  const char *phi;
  const struct GmDocument *against;
} GmOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a JSON curve document. On failure `*out` is NULL and, when `err` is
 * non-NULL, `*err` receives an error string to free with [`gm_string_free`].
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable; `err` may
 * be NULL.
 */
enum GmStatus gm_document_parse(const char *json, struct GmDocument **out, char **err);

/**
 * Look up a bundled catalog entry by name.
 *
 * # Safety
 * As for [`gm_document_parse`].
 */
enum GmStatus gm_document_catalog(const char *name, struct GmDocument **out, char **err);

/**
 * Canonical JSON of a document.
 *
 * # Safety
 * `doc` must be a live handle; `out` must be writable.
 */
enum GmStatus gm_document_emit(const struct GmDocument *doc, char **out);

/**
 * # Safety
 * `doc` must be NULL or a handle not yet freed.
 */
void gm_document_free(struct GmDocument *doc);

/**
 * Default options: truncation 32, default degree bound, seed 0.
 */
struct GmOptions gm_options_default(void);

/**
 * Run a command; `*out` receives the JSON report (or an error object).
 *
 * # Safety
 * `doc` must be a live handle; `opts` may be NULL for defaults; pointers in
 * `opts` must be valid for the stated lengths; `out` must be writable.
 */
enum GmStatus gm_run(const struct GmDocument *doc,
                     enum GmCommand command,
                     const struct GmOptions *opts,
                     char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void gm_string_free(char *s);

/**
 * Library version, static storage.
 */
const char *gm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GERM_MODULI_H */
