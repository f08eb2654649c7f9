#ifndef MLPA_H
#define MLPA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MlpaStatus {
  MLPA_STATUS_OK = 0,
  /**
   * An argument is outside the operation's domain.
   */
  MLPA_STATUS_DOMAIN = 1,
  /**
   * A numerical routine failed to converge or hit an iteration cap.
   */
  MLPA_STATUS_NUMERIC = 2,
  MLPA_STATUS_NULL_POINTER = 3,
  /**
   * The caller's buffer is shorter than the result.
   */
  MLPA_STATUS_BUFFER_TOO_SMALL = 4,
  MLPA_STATUS_INTERNAL = 5,
} MlpaStatus;

/**
 * Opaque random stream.
 */
typedef struct MlpaRng MlpaRng;

/**
 * Opaque beta-recursive tree.
 */
typedef struct MlpaTree MlpaTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *mlpa_last_error(void);

/**
 * New stream keyed by `(seed, stream)`. Never NULL.
 */
struct MlpaRng *mlpa_rng_new(uint64_t seed, uint64_t stream);

/**
 * # Safety
 * `rng` is NULL or a pointer from `mlpa_rng_new` not yet freed.
 */
void mlpa_rng_free(struct MlpaRng *rng);

/**
 * Uniform on the open interval (0, 1).
 *
 * # Safety
 * `rng` is a live handle; `out` is NULL or writable.
 */
enum MlpaStatus mlpa_rng_uniform(struct MlpaRng *rng, double *out);

/**
 * `E[S_{alpha,theta}^{-delta}]`.
 *
 * # Safety
 * `out` is NULL or writable.
 */
enum MlpaStatus mlpa_neg_moment(double alpha, double theta, double delta, double *out);

/**
 * Positive stable density `f_alpha(t)`.
 *
 * # Safety
 * `out` is NULL or writable.
 */
enum MlpaStatus mlpa_stable_pdf(double alpha, double t, double *out);

/**
 * Confluent hypergeometric function of the second kind `U(a, b, z)`.
 *
 * # Safety
 * `out` is NULL or writable.
 */
enum MlpaStatus mlpa_kummer_u(double a, double b, double z, double *out);

/**
 * `P(K_n = k)` for `k = 0..=n` under `PD(alpha, theta)`, into `out[0..=n]`.
 *
 * # Safety
 * `out` is NULL or points to `len` writable doubles.
 */
enum MlpaStatus mlpa_exact_kn_pmf(double alpha, double theta, size_t n, double *out, size_t len);

/**
 * Merger kernel `p_{alpha,theta}(ell | b)`.
 *
 * # Safety
 * `out` is NULL or writable.
 */
enum MlpaStatus mlpa_merger_pmf(double alpha, double theta, size_t b, size_t ell, double *out);

/**
 * Positive alpha-stable variate with Laplace transform `exp(-w^alpha)`.
 *
 * # Safety
 * `rng` is a live handle; `out` is NULL or writable.
 */
enum MlpaStatus mlpa_sample_stable(double alpha, struct MlpaRng *rng, double *out);

/**
 * Variate with density proportional to `t^{-theta} f_alpha(t)`.
 *
 * # Safety
 * `rng` is a live handle; `out` is NULL or writable.
 */
enum MlpaStatus mlpa_sample_tilted_stable(double alpha,
                                          double theta,
                                          struct MlpaRng *rng,
                                          double *out);

/**
 * Generalized Mittag-Leffler variate `S_{alpha,theta}^{-alpha}`.
 *
 * # Safety
 * `rng` is a live handle; `out` is NULL or writable.
 */
enum MlpaStatus mlpa_sample_gml(double alpha, double theta, struct MlpaRng *rng, double *out);

/**
 * Chain values `S_{alpha,theta+j}^{-alpha}`, `j = 0..=r`, into `out[0..=r]`.
 *
 * # Safety
 * `rng` is a live handle; `out` is NULL or points to `len` writable doubles.
 */
enum MlpaStatus mlpa_sample_chain(double alpha,
                                  double theta,
                                  size_t r,
                                  struct MlpaRng *rng,
                                  double *out,
                                  size_t len);

/**
 * Block count of a `PD(alpha, theta)` seating of `n` customers.
 *
 * # Safety
 * `rng` is a live handle; `out` is NULL or writable.
 */
enum MlpaStatus mlpa_sample_crp_count(double alpha,
                                      double theta,
                                      size_t n,
                                      struct MlpaRng *rng,
                                      size_t *out);

/**
 * Grows a tree with `n` edges and stores a new handle in `*out`.
 *
 * # Safety
 * `rng` is a live handle; `out` is NULL or writable. On failure `*out` is untouched.
 */
enum MlpaStatus mlpa_tree_grow(double beta, size_t n, struct MlpaRng *rng, struct MlpaTree **out);

/**
 * # Safety
 * `tree` is NULL or a handle from `mlpa_tree_grow` not yet freed.
 */
void mlpa_tree_free(struct MlpaTree *tree);

/**
 * Edge count `n`; 0 for NULL.
 *
 * # Safety
 * `tree` is NULL or a live handle.
 */
size_t mlpa_tree_edges(const struct MlpaTree *tree);

/**
 * Degrees `d[0..=n]`.
 *
 * # Safety
 * `tree` is a live handle; `out` is NULL or points to `len` writable values.
 */
enum MlpaStatus mlpa_tree_degrees(const struct MlpaTree *tree, uint32_t *out, size_t len);

/**
 * Parents `p[0..=n]`; `p[0]` is 0 and carries no meaning.
 *
 * # Safety
 * `tree` is a live handle; `out` is NULL or points to `len` writable values.
 */
enum MlpaStatus mlpa_tree_parents(const struct MlpaTree *tree, uint32_t *out, size_t len);

/**
 * `n^{-1/(2+beta)} d[0..=r]`.
 *
 * # Safety
 * `tree` is a live handle; `out` is NULL or points to `len` writable doubles.
 */
enum MlpaStatus mlpa_tree_scaled_degrees(const struct MlpaTree *tree,
                                         size_t r,
                                         double *out,
                                         size_t len);

/**
 * `n^{-1/(2+beta)} max_{i <= r_cap} d[i]`.
 *
 * # Safety
 * `tree` is a live handle; `out` is NULL or writable.
 */
enum MlpaStatus mlpa_tree_max_scaled_degree(const struct MlpaTree *tree, size_t r_cap, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MLPA_H */
