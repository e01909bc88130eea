#ifndef MAGNIPERSIST_H
#define MAGNIPERSIST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; the nonzero values below 6 match the CLI exit codes.
 */
typedef enum MpStatus {
  MP_STATUS_OK = 0,
  MP_STATUS_USAGE = 1,
  MP_STATUS_PARSE = 2,
  MP_STATUS_VALIDATION = 3,
  MP_STATUS_RESOURCE = 4,
  MP_STATUS_INTERNAL_CHECK = 5,
  MP_STATUS_NULL_POINTER = 6,
  MP_STATUS_INVALID_UTF8 = 7,
  MP_STATUS_PANIC = 8,
} MpStatus;

/**
 * A validated finite metric space.
 */
typedef struct MpSpace MpSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a distance matrix in the text format and validate it as a metric space.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MpStatus mp_space_from_text(const char *text, struct MpSpace **out);

/**
 * # Safety
 * `space` must come from [`mp_space_from_text`] and not be freed twice.
 */
void mp_space_free(struct MpSpace *space);

/**
 * Number of points, or 0 for a null handle.
 *
 * # Safety
 * `space` must be null or a live handle.
 */
size_t mp_space_len(const struct MpSpace *space);

/**
 * Magnitude as a rational function in `q`.
 *
 * # Safety
 * `space` must be a live handle and `out` a valid pointer.
 */
enum MpStatus mp_magnitude(const struct MpSpace *space, char **out);

/**
 * Magnitude of `tX`; the decimal string is optional.
 *
 * # Safety
 * `space` and `t` must be valid; `out_decimal` may be null.
 */
enum MpStatus mp_magnitude_eval(const struct MpSpace *space,
                                const char *t,
                                uint32_t precision,
                                double *out_value,
                                char **out_decimal);

/**
 * Magnitude homology table as TSV `n l rank torsion`.
 *
 * # Safety
 * `space` and `l_max` must be valid and `out` a valid pointer.
 */
enum MpStatus mp_magnitude_homology_tsv(const struct MpSpace *space,
                                        uint32_t n_max,
                                        const char *l_max,
                                        bool unnormalized,
                                        char **out);

/**
 * Euler characteristic check as TSV `l chi series expansion ok`.
 *
 * # Safety
 * `space` and `l_max` must be valid and `out` a valid pointer.
 */
enum MpStatus mp_euler_check_tsv(const struct MpSpace *space,
                                 uint32_t n_max,
                                 const char *l_max,
                                 char **out);

/**
 * Blurred magnitude homology barcode as TSV `k birth death`.
 *
 * # Safety
 * `space` and `eps_max` must be valid and `out` a valid pointer.
 */
enum MpStatus mp_blurred_barcode_tsv(const struct MpSpace *space,
                                     uint32_t dim_max,
                                     const char *eps_max,
                                     uint64_t prime,
                                     char **out);

/**
 * Vietoris–Rips barcode as TSV `k birth death`.
 *
 * # Safety
 * `space` and `eps_max` must be valid and `out` a valid pointer.
 */
enum MpStatus mp_rips_barcode_tsv(const struct MpSpace *space,
                                  uint32_t dim_max,
                                  const char *eps_max,
                                  uint64_t prime,
                                  char **out);

/**
 * Degree-0 limits of blurred and ordinary magnitude homology.
 *
 * # Safety
 * `space` must be a live handle and both outputs valid pointers.
 */
enum MpStatus mp_separation_witness(const struct MpSpace *space,
                                    uint64_t prime,
                                    size_t *out_blurred,
                                    size_t *out_ordinary);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void mp_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null.
 *
 * The pointer stays valid until the next library call on the same thread.
 */
const char *mp_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MAGNIPERSIST_H */
