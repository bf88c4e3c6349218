/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef UDLAB_H
#define UDLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum UdlabStatus {
  UdlabStatus_Ok = 0,
  UdlabStatus_NullPointer = 1,
  UdlabStatus_InvalidUtf8 = 2,
  UdlabStatus_UnknownName = 3,
  UdlabStatus_InvalidParams = 4,
  UdlabStatus_Failed = 5,
  UdlabStatus_BufferTooSmall = 6,
  UdlabStatus_Panic = 7,
} UdlabStatus;

/**
 * Verdict of a finished game.
 */
typedef enum UdlabVerdict {
  UdlabVerdict_WithinBound = 0,
  UdlabVerdict_ExceedsBound = 1,
  UdlabVerdict_Inconclusive = 2,
} UdlabVerdict;

/**
 * A secret key of a scheme.
 */
typedef struct UdlabKey UdlabKey;

/**
 * A finished game report.
 */
typedef struct UdlabReport UdlabReport;

/**
 * Settings for one game run, as `key = value` pairs with the CLI's option names.
 */
typedef struct UdlabRunConfig UdlabRunConfig;

/**
 * A parsed encryption scheme bound to a backend.
 */
typedef struct UdlabScheme UdlabScheme;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread as a NUL-terminated string.
 *
 * # Safety
 * `buf` must be valid for `len` bytes (or null to query the size); `needed` must be valid.
 */
enum UdlabStatus udlab_last_error(char *buf, size_t len, size_t *needed);

/**
 * Creates an empty run configuration.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum UdlabStatus udlab_config_new(struct UdlabRunConfig **out);

/**
 * Sets one option, e.g. `("game", "flip_qcp")` or `("trials", "1000")`.
 *
 * # Safety
 * `config` must come from [`udlab_config_new`]; `key` and `value` must be NUL-terminated.
 */
enum UdlabStatus udlab_config_set(struct UdlabRunConfig *config,
                                  const char *key,
                                  const char *value);

/**
 * # Safety
 * `config` must come from [`udlab_config_new`] or be null.
 */
void udlab_config_free(struct UdlabRunConfig *config);

/**
 * Runs the configured game. A missing seed is drawn from OS entropy; read it back from the report.
 *
 * # Safety
 * `config` must come from [`udlab_config_new`]; `out` must be valid.
 */
enum UdlabStatus udlab_run(const struct UdlabRunConfig *config, struct UdlabReport **out);

/**
 * # Safety
 * `report` must come from [`udlab_run`]; the out pointers must be valid.
 */
enum UdlabStatus udlab_report_summary(const struct UdlabReport *report,
                                      double *mean,
                                      double *half_width,
                                      enum UdlabVerdict *verdict);

/**
 * # Safety
 * `report` must come from [`udlab_run`]; `seed` must be valid.
 */
enum UdlabStatus udlab_report_seed(const struct UdlabReport *report, uint64_t *seed);

/**
 * Copies the JSON report as a NUL-terminated string.
 *
 * # Safety
 * `buf` must be valid for `len` bytes or null; `needed` must be valid.
 */
enum UdlabStatus udlab_report_json(const struct UdlabReport *report,
                                   char *buf,
                                   size_t len,
                                   size_t *needed);

/**
 * # Safety
 * `report` must come from [`udlab_run`] or be null.
 */
void udlab_report_free(struct UdlabReport *report);

/**
 * Parses a scheme specification such as `extend(ud1_cpa)` for `backend` (e.g. `ideal_token`).
 *
 * # Safety
 * Strings must be NUL-terminated; `out` must be valid.
 */
enum UdlabStatus udlab_scheme_new(const char *spec, const char *backend, struct UdlabScheme **out);

/**
 * # Safety
 * `scheme` must come from [`udlab_scheme_new`] or be null.
 */
void udlab_scheme_free(struct UdlabScheme *scheme);

/**
 * Generates a key deterministically from `seed`.
 *
 * # Safety
 * `scheme` must come from [`udlab_scheme_new`]; `out` must be valid.
 */
enum UdlabStatus udlab_key_gen(const struct UdlabScheme *scheme,
                               size_t lambda,
                               uint64_t seed,
                               struct UdlabKey **out);

/**
 * # Safety
 * `key` must come from [`udlab_key_gen`] or be null.
 */
void udlab_key_free(struct UdlabKey *key);

/**
 * Encrypts a message given as a string of `0`/`1` characters; writes the ciphertext bytes.
 *
 * # Safety
 * Handles must be live; `message` NUL-terminated; `buf` valid for `len` bytes or null; `needed` valid.
 */
enum UdlabStatus udlab_encrypt(const struct UdlabScheme *scheme,
                               const struct UdlabKey *key,
                               const char *message,
                               uint64_t seed,
                               uint8_t *buf,
                               size_t len,
                               size_t *needed);

/**
 * Decrypts ciphertext bytes. The plaintext is written as a NUL-terminated `0`/`1`
 * string; `*rejected` is set to 1 (and nothing is written) when decryption gives ⊥.
 *
 * # Safety
 * Handles must be live; `ct` valid for `ct_len` bytes; `buf` valid for `len` bytes or null;
 * `needed` and `rejected` valid.
 */
enum UdlabStatus udlab_decrypt(const struct UdlabScheme *scheme,
                               const struct UdlabKey *key,
                               const uint8_t *ct,
                               size_t ct_len,
                               char *buf,
                               size_t len,
                               size_t *needed,
                               uint8_t *rejected);

/**
 * Library version as a static NUL-terminated string.
 */
const char *udlab_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UDLAB_H */
