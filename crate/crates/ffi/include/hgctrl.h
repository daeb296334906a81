/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#ifndef HGCTRL_H
#define HGCTRL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HgMethod {
  HG_METHOD_MATCHING = 0,
  HG_METHOD_GREEDY = 1,
  HG_METHOD_MAG = 2,
  HG_METHOD_OPTIMAL = 3,
} HgMethod;

typedef enum HgStatus {
  HG_STATUS_OK = 0,
  HG_STATUS_NULL_ARGUMENT = 1,
  HG_STATUS_INVALID_UTF8 = 2,
  HG_STATUS_VALIDATION = 3,
  HG_STATUS_CAPACITY = 4,
  HG_STATUS_PARSE = 5,
  HG_STATUS_IO = 6,
  HG_STATUS_PANIC = 7,
} HgStatus;

typedef enum HgTopology {
  HG_TOPOLOGY_UNIFORM = 0,
  HG_TOPOLOGY_SCALE_FREE = 1,
  HG_TOPOLOGY_CLUSTERED = 2,
  HG_TOPOLOGY_SMALL_WORLD = 3,
} HgTopology;

/**
 * Opaque hypergraph handle.
 */
typedef struct HgHypergraph HgHypergraph;

/**
 * Opaque selection result.
 */
typedef struct HgSelection HgSelection;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *hg_last_error(void);

/**
 * Parses the JSON interchange format.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum HgStatus hg_hypergraph_from_json(const char *json, struct HgHypergraph **out);

/**
 * # Safety
 * `path` must be a nul-terminated string; `out` must be writable.
 */
enum HgStatus hg_hypergraph_read(const char *path, struct HgHypergraph **out);

/**
 * # Safety
 * `h` must come from this library and not be used afterwards. Null is a
 * no-op.
 */
void hg_hypergraph_free(struct HgHypergraph *h);

/**
 * Canonical JSON text; release it with [`hg_string_free`].
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum HgStatus hg_hypergraph_to_json(const struct HgHypergraph *h, char **out);

/**
 * # Safety
 * `s` must come from this library. Null is a no-op.
 */
void hg_string_free(char *s);

/**
 * Number of state nodes, or 0 for null.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t hg_hypergraph_num_nodes(const struct HgHypergraph *h);

/**
 * Number of state hyperedges, or 0 for null.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t hg_hypergraph_num_edges(const struct HgHypergraph *h);

/**
 * Random hypergraph with default topology parameters.
 *
 * # Safety
 * `out` must be writable.
 */
enum HgStatus hg_generate(enum HgTopology topology,
                          size_t n,
                          size_t k,
                          double alpha,
                          uint64_t seed,
                          struct HgHypergraph **out);

/**
 * Structural controllability of `h` with the given 1-based drivers.
 *
 * # Safety
 * `h` must be a live handle, `drivers` must hold `len` values (or be null
 * when `len` is 0), and `out` must be writable.
 */
enum HgStatus hg_verify(const struct HgHypergraph *h,
                        const uint32_t *drivers,
                        size_t len,
                        bool *out);

/**
 * Matching lower bound on the number of drivers.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum HgStatus hg_lower_bound(const struct HgHypergraph *h, size_t *out);

/**
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum HgStatus hg_select(const struct HgHypergraph *h,
                        enum HgMethod method,
                        struct HgSelection **out);

/**
 * 1-based driver ids, ascending. The array lives as long as `s`.
 *
 * # Safety
 * `s` must be a live handle; `len` must be writable.
 */
const uint32_t *hg_selection_drivers(const struct HgSelection *s, size_t *len);

/**
 * # Safety
 * `s` must be null or a live handle.
 */
bool hg_selection_controllable(const struct HgSelection *s);

/**
 * # Safety
 * `s` must be null or a live handle.
 */
size_t hg_selection_lower_bound(const struct HgSelection *s);

/**
 * # Safety
 * `s` must be null or a live handle.
 */
double hg_selection_runtime_ms(const struct HgSelection *s);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is a
 * no-op.
 */
void hg_selection_free(struct HgSelection *s);

/**
 * Fraction of `trials` random realizations reaching full controllability
 * rank. Writes NaN when `trials` is 0.
 *
 * # Safety
 * As for [`hg_verify`].
 */
enum HgStatus hg_oracle_fraction(const struct HgHypergraph *h,
                                 const uint32_t *drivers,
                                 size_t len,
                                 size_t trials,
                                 uint64_t seed,
                                 double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HGCTRL_H */
