#ifndef INVRIG_H
#define INVRIG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum InvrigStatus {
  INVRIG_STATUS_OK = 0,
  INVRIG_STATUS_NULL_POINTER = 1,
  INVRIG_STATUS_INVALID_ARGUMENT = 2,
  // Input violates a framework, circle or triangulation invariant.
  INVRIG_STATUS_VALIDATION = 3,
  INVRIG_STATUS_PARSE = 4,
  INVRIG_STATUS_NO_CONVERGENCE = 5,
  INVRIG_STATUS_BUFFER_TOO_SMALL = 6,
  // Numerical or geometric failure other than non-convergence.
  INVRIG_STATUS_NUMERICAL = 7,
  INVRIG_STATUS_PANIC = 8,
} InvrigStatus;

// Opaque framework handle.
typedef struct InvrigFramework InvrigFramework;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Framework from `n` circles (`xs`, `ys`, `rs`) and `m` edges stored as
// `2m` vertex indices.
//
// # Safety
// Array arguments must point to at least the stated number of elements;
// `out` must be writable.
enum InvrigStatus invrig_framework_new(size_t n,
                                       const double *xs,
                                       const double *ys,
                                       const double *rs,
                                       size_t m,
                                       const size_t *edges,
                                       struct InvrigFramework **out);

// Framework on a sphere triangulation given as `num_faces` triples; the
// edges are the triangulation's 1-skeleton.
//
// # Safety
// As for `invrig_framework_new`, with `faces` holding `3 * num_faces`
// indices.
enum InvrigStatus invrig_framework_from_faces(size_t n,
                                              const double *xs,
                                              const double *ys,
                                              const double *rs,
                                              size_t num_faces,
                                              const size_t *faces,
                                              struct InvrigFramework **out);

// Framework from a JSON framework document (NUL-terminated UTF-8).
//
// # Safety
// `json` must be a valid C string; `out` must be writable.
enum InvrigStatus invrig_framework_from_json(const char *json, struct InvrigFramework **out);

// Univalent tangency framework of a triangulation with vertex `v_inf`
// sent to the outer circle; `tol` is the packing tolerance (0 for the
// default).
//
// # Safety
// `faces` must hold `3 * num_faces` indices; `out` must be writable.
enum InvrigStatus invrig_koebe_framework(size_t num_vertices,
                                         size_t num_faces,
                                         const size_t *faces,
                                         size_t v_inf,
                                         double tol,
                                         struct InvrigFramework **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `f` must come from an `invrig` constructor and not be used afterwards.
void invrig_framework_free(struct InvrigFramework *f);

// Number of circles, 0 for null.
//
// # Safety
// `f` must be null or a live handle.
size_t invrig_framework_num_circles(const struct InvrigFramework *f);

// Number of edges, 0 for null.
//
// # Safety
// `f` must be null or a live handle.
size_t invrig_framework_num_edges(const struct InvrigFramework *f);

// Circle coordinates as `x0, y0, r0, x1, …` (length `3n`).
//
// # Safety
// `out` must hold `len` doubles; `needed` may be null.
enum InvrigStatus invrig_framework_coordinates(const struct InvrigFramework *f,
                                               double *out,
                                               size_t len,
                                               size_t *needed);

// Edge list as `2m` indices, each pair ascending, in edge order.
//
// # Safety
// `out` must hold `len` indices; `needed` may be null.
enum InvrigStatus invrig_framework_edges(const struct InvrigFramework *f,
                                         size_t *out,
                                         size_t len,
                                         size_t *needed);

// Rank of the rigidity matrix. `exact` selects rational elimination;
// `rel_tol` is the relative singular-value tolerance (0 for the default).
// Any output pointer may be null.
//
// # Safety
// `f` must be a live handle; non-null outputs must be writable.
enum InvrigStatus invrig_rank(const struct InvrigFramework *f,
                              bool exact,
                              double rel_tol,
                              size_t *rank,
                              int64_t *required_rank,
                              bool *rigid);

// Inversive distance of every edge (length `m`).
//
// # Safety
// `out` must hold `len` doubles; `needed` may be null.
enum InvrigStatus invrig_inversive_distances(const struct InvrigFramework *f,
                                             double *out,
                                             size_t len,
                                             size_t *needed);

// Rigidity matrix, row-major `m × 3n`.
//
// # Safety
// `out` must hold `len` doubles; `needed` may be null.
enum InvrigStatus invrig_rigidity_matrix(const struct InvrigFramework *f,
                                         double *out,
                                         size_t len,
                                         size_t *needed);

// Dimension of the equilibrium-stress space.
//
// # Safety
// `f` must be a live handle and `count` writable.
enum InvrigStatus invrig_stress_count(const struct InvrigFramework *f,
                                      double rel_tol,
                                      size_t *count);

// Framework document as NUL-terminated JSON. `needed` receives the size
// including the terminator.
//
// # Safety
// `out` must hold `len` bytes; `needed` may be null.
enum InvrigStatus invrig_framework_to_json(const struct InvrigFramework *f,
                                           char *out,
                                           size_t len,
                                           size_t *needed);

// Message for the calling thread's last failed call, or null. Valid until
// the next `invrig` call on this thread.
const char *invrig_last_error_message(void);

// Library version as a static C string.
const char *invrig_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INVRIG_H */
