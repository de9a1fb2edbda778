#ifndef CUSPGEOM_H
#define CUSPGEOM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call.
 */
typedef enum CgStatus {
  CgStatus_Ok = 0,
  CgStatus_NullPointer = 1,
  CgStatus_InvalidInput = 2,
  CgStatus_SizeCap = 3,
  CgStatus_Exactness = 4,
  CgStatus_Domain = 5,
  CgStatus_InvalidCertificate = 6,
  CgStatus_BufferTooSmall = 7,
  CgStatus_Internal = 8,
} CgStatus;

/**
 * Growth verdict of a degree fit.
 */
typedef enum CgVerdict {
  CgVerdict_Polynomial = 0,
  CgVerdict_Exponential = 1,
  CgVerdict_Inconclusive = 2,
} CgVerdict;

/**
 * Certificate family for [`cg_asdim_multiplicity`].
 */
typedef enum CgAsdimKind {
  CgAsdimKind_IntegerLine = 0,
  CgAsdimKind_IntegerGrid2d = 1,
  CgAsdimKind_RegularTree = 2,
} CgAsdimKind;

/**
 * Opaque cusped space over `Z*Z^2`.
 */
typedef struct CgCusped CgCusped;

/**
 * Opaque group model.
 */
typedef struct CgGroup CgGroup;

/**
 * Degree fit over a window of the growth table.
 */
typedef struct CgFit {
  double p;
  double k1;
  double k2;
  double residual;
  double semilog_residual;
  enum CgVerdict verdict;
  /**
   * Degree for a polynomial verdict, base for an exponential one.
   */
  double verdict_value;
} CgFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version string; static, never freed.
 */
const char *cg_version(void);

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length, or 0
 * if there is none.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
uintptr_t cg_last_error(char *buf, uintptr_t len);

/**
 * Parses a group spec such as `free-abelian:2` or `heisenberg`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CgStatus cg_group_parse(const char *spec, struct CgGroup **out);

/**
 * # Safety
 * `group` must be null or a handle from [`cg_group_parse`] not yet freed.
 */
void cg_group_free(struct CgGroup *group);

/**
 * Writes `gr(0..=rmax)` into `out`, which must hold `rmax + 1` entries.
 *
 * # Safety
 * `group` must be a live handle and `out` valid for `len` entries.
 */
enum CgStatus cg_growth(const struct CgGroup *group,
                        uint32_t rmax,
                        uintptr_t max_vertices,
                        uint64_t *out,
                        uintptr_t len);

/**
 * Fits the growth degree on the window `[lo, hi]`.
 *
 * # Safety
 * `group` must be a live handle and `out` a valid pointer.
 */
enum CgStatus cg_fit_degree(const struct CgGroup *group,
                            uint32_t lo,
                            uint32_t hi,
                            uintptr_t max_vertices,
                            struct CgFit *out);

/**
 * Horoball distance between levels `t` and `t2` over base distance `n`.
 */
double cg_horoball_rho(double n, double t, double t2);

/**
 * Builds and checks a standard cover certificate and reports its
 * multiplicity.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CgStatus cg_asdim_multiplicity(enum CgAsdimKind kind,
                                    uintptr_t extent,
                                    uint32_t d,
                                    uintptr_t valence,
                                    uintptr_t *out);

/**
 * Builds the cusped space of `Z*Z^2` over the ball of radius `radius`;
 * `truncation == 0` selects the default.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CgStatus cg_cusped_build(uint32_t radius,
                              uint32_t truncation,
                              uintptr_t max_vertices,
                              struct CgCusped **out);

/**
 * Number of nodes, or 0 for a null handle.
 *
 * # Safety
 * `space` must be null or a live handle.
 */
uintptr_t cg_cusped_node_count(const struct CgCusped *space);

/**
 * Four-point estimate on a seeded sample of `sample` nodes.
 *
 * # Safety
 * `space` must be a live handle and `out` a valid pointer.
 */
enum CgStatus cg_cusped_delta(const struct CgCusped *space,
                              uintptr_t sample,
                              uint64_t quadruples,
                              uint64_t seed,
                              double *out);

/**
 * # Safety
 * `space` must be null or a handle from [`cg_cusped_build`] not yet freed.
 */
void cg_cusped_free(struct CgCusped *space);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUSPGEOM_H */
