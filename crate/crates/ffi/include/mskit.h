#ifndef MSKIT_H
#define MSKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of an FFI call. Nonzero values match the command-line exit codes
 * where one exists.
 */
typedef enum MskitStatus {
  MSKIT_STATUS_OK = 0,
  MSKIT_STATUS_PARSE = 1,
  MSKIT_STATUS_INVALID = 2,
  MSKIT_STATUS_OBSTRUCTION = 3,
  MSKIT_STATUS_CHECKER = 4,
  MSKIT_STATUS_NULL_POINTER = 5,
  MSKIT_STATUS_UTF8 = 6,
  MSKIT_STATUS_PANIC = 7,
} MskitStatus;

/**
 * A validated Brauer configuration.
 */
typedef struct MskitConfig MskitConfig;

/**
 * A special-shape presentation of an algebra.
 */
typedef struct MskitPresentation MskitPresentation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread; do not free.
 */
const char *mskit_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void mskit_string_free(char *s);

/**
 * Parses and validates `.bcfg` text.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum MskitStatus mskit_config_parse(const char *src, struct MskitConfig **out);

/**
 * A seeded random configuration with at most `polygons` polygons, valencies
 * at most `max_val` and multiplicities at most `max_mu`.
 *
 * # Safety
 * `out` must be writable.
 */
enum MskitStatus mskit_config_random(uint64_t seed,
                                     size_t polygons,
                                     size_t max_val,
                                     uint32_t max_mu,
                                     struct MskitConfig **out);

/**
 * # Safety
 * `cfg` must come from this library and not have been freed. NULL is ignored.
 */
void mskit_config_free(struct MskitConfig *cfg);

/**
 * Number of vertices and polygons.
 *
 * # Safety
 * `cfg` must be a live handle; the out pointers must be writable.
 */
enum MskitStatus mskit_config_counts(const struct MskitConfig *cfg,
                                     size_t *vertices,
                                     size_t *polygons);

/**
 * `.bcfg` text of the configuration.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum MskitStatus mskit_config_to_text(const struct MskitConfig *cfg, char **out);

/**
 * JSON export of the configuration.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum MskitStatus mskit_config_to_json(const struct MskitConfig *cfg, char **out);

/**
 * The configuration algebra over Q (`characteristic == 0`) or F_p.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum MskitStatus mskit_config_build(const struct MskitConfig *cfg,
                                    uint32_t characteristic,
                                    struct MskitPresentation **out);

/**
 * Whether two configurations are isomorphic.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum MskitStatus mskit_config_isomorphic(const struct MskitConfig *a,
                                         const struct MskitConfig *b,
                                         bool *out);

/**
 * Builds the algebra and recovers it again; `out` is true when the result is
 * isomorphic to the input.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum MskitStatus mskit_config_roundtrip(const struct MskitConfig *cfg,
                                        uint32_t characteristic,
                                        bool *out);

/**
 * Parses `.qpres` text.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum MskitStatus mskit_presentation_parse(const char *src, struct MskitPresentation **out);

/**
 * # Safety
 * `p` must come from this library and not have been freed. NULL is ignored.
 */
void mskit_presentation_free(struct MskitPresentation *p);

/**
 * Dimension of the algebra over its field.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum MskitStatus mskit_presentation_dimension(const struct MskitPresentation *p, size_t *out);

/**
 * `.qpres` text of the presentation.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum MskitStatus mskit_presentation_to_text(const struct MskitPresentation *p, char **out);

/**
 * JSON export of the presentation.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum MskitStatus mskit_presentation_to_json(const struct MskitPresentation *p, char **out);

/**
 * Recovers the Brauer configuration of a symmetric presentation.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum MskitStatus mskit_presentation_recover(const struct MskitPresentation *p,
                                            struct MskitConfig **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MSKIT_H */
