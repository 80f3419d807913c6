#ifndef PADELAB_H
#define PADELAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PadelabStatus {
  PADELAB_STATUS_OK = 0,
  PADELAB_STATUS_NULL_ARGUMENT = 1,
  PADELAB_STATUS_INVALID_UTF8 = 2,
  PADELAB_STATUS_INVALID_CONFIG = 3,
  PADELAB_STATUS_IO = 4,
  PADELAB_STATUS_SOLVE_FAILED = 5,
  PADELAB_STATUS_NOT_FOUND = 6,
  PADELAB_STATUS_BUFFER_TOO_SMALL = 7,
  PADELAB_STATUS_INTERNAL = 8,
} PadelabStatus;

/**
 * A validated run configuration.
 */
typedef struct PadelabConfig PadelabConfig;

/**
 * The result of solving every order of a configuration.
 */
typedef struct PadelabRun PadelabRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *padelab_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library, not yet freed.
 */
void padelab_string_free(char *s);

/**
 * Parses and validates a JSON configuration.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out_config` must be writable.
 */
enum PadelabStatus padelab_config_from_json(const char *json, struct PadelabConfig **out_config);

/**
 * Loads one of the bundled configurations by name, e.g. `markov_arcsine`.
 *
 * # Safety
 * `name` must be a nul-terminated string; `out_config` must be writable.
 */
enum PadelabStatus padelab_config_bundled(const char *name, struct PadelabConfig **out_config);

/**
 * Replaces the orders to solve.
 *
 * # Safety
 * `config` must be a live handle; `ns` must point to `len` values.
 */
enum PadelabStatus padelab_config_set_orders(struct PadelabConfig *config,
                                             const size_t *ns,
                                             size_t len);

/**
 * Sets the working precision in bits.
 *
 * # Safety
 * `config` must be a live handle.
 */
enum PadelabStatus padelab_config_set_precision(struct PadelabConfig *config, uint32_t bits);

/**
 * # Safety
 * `config` must be null or a handle not yet freed.
 */
void padelab_config_free(struct PadelabConfig *config);

/**
 * Solves every order and runs the enabled checkers. Orders that fail to
 * solve are recorded in the report; the call itself still succeeds.
 *
 * # Safety
 * `config` must be a live handle; `out_run` must be writable.
 */
enum PadelabStatus padelab_run(const struct PadelabConfig *config, struct PadelabRun **out_run);

/**
 * # Safety
 * `run` must be null or a handle not yet freed.
 */
void padelab_run_free(struct PadelabRun *run);

/**
 * Whether every order solved and every enabled checker passed.
 *
 * # Safety
 * `run` must be a live handle; `out_ok` must be writable.
 */
enum PadelabStatus padelab_run_ok(const struct PadelabRun *run, bool *out_ok);

/**
 * The run report as pretty-printed JSON; free with [`padelab_string_free`].
 *
 * # Safety
 * `run` must be a live handle; `out_json` must be writable.
 */
enum PadelabStatus padelab_run_report_json(const struct PadelabRun *run, char **out_json);

/**
 * Writes all artifacts of the run into `dir`.
 *
 * # Safety
 * `run` must be a live handle; `dir` must be a nul-terminated string.
 */
enum PadelabStatus padelab_run_write(const struct PadelabRun *run, const char *dir);

/**
 * Copies the zeros of `q_n` into `re`/`im` (capacity `cap`). The count is
 * always stored in `out_len`; a short buffer gives `BufferTooSmall`.
 *
 * # Safety
 * `run` must be a live handle; `re` and `im` must hold `cap` values or be
 * null with `cap == 0`; `out_len` must be writable.
 */
enum PadelabStatus padelab_run_poles(const struct PadelabRun *run,
                                     size_t n,
                                     double *re,
                                     double *im,
                                     size_t cap,
                                     size_t *out_len);

/**
 * `Π_n(z)` rounded to double precision.
 *
 * # Safety
 * `run` must be a live handle; `out_re` and `out_im` must be writable.
 */
enum PadelabStatus padelab_run_eval(const struct PadelabRun *run,
                                    size_t n,
                                    double re,
                                    double im,
                                    double *out_re,
                                    double *out_im);

/**
 * Runs a bundled oracle suite (`markov`, `potential` or `all`); the
 * PASS/FAIL lines go to `out_text`, free with [`padelab_string_free`].
 *
 * # Safety
 * `name` must be a nul-terminated string; outputs must be writable.
 */
enum PadelabStatus padelab_oracle(const char *name,
                                  uint32_t precision,
                                  char **out_text,
                                  bool *out_all_pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PADELAB_H */
