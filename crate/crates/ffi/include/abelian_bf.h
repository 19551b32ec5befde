#ifndef ABELIAN_BF_H
#define ABELIAN_BF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// How the free part of `H_1` enters the partition function.
typedef enum BfConvention {
  BF_CONVENTION_TORSION_ONLY = 0,
  BF_CONVENTION_INCLUDE_FREE_FACTOR = 1,
} BfConvention;

// Result codes.
typedef enum BfStatus {
  BF_STATUS_OK = 0,
  BF_STATUS_NULL_POINTER = 1,
  BF_STATUS_INVALID_UTF8 = 2,
  BF_STATUS_INVALID_ARGUMENT = 3,
  BF_STATUS_PARSE = 4,
  BF_STATUS_CONSISTENCY = 5,
  BF_STATUS_NOT_FOUND = 6,
  BF_STATUS_TOO_LARGE = 7,
  BF_STATUS_DEGENERATE = 8,
  BF_STATUS_MISSING_LINKING_FORM = 9,
  BF_STATUS_IO = 10,
  BF_STATUS_PANIC = 11,
} BfStatus;

// A finite chain complex of free abelian groups.
typedef struct BfComplex BfComplex;

// A finitely generated abelian group `Z^r + Z_{p_1} + ... + Z_{p_N}`.
typedef struct BfGroup BfGroup;

// A closed 3-manifold with its homology and linking form.
typedef struct BfManifold BfManifold;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The message of the last failed call on this thread, or null. The
// pointer stays valid until the next call on this thread.
const char *bf_last_error_message(void);

// Library version as a static string.
const char *bf_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void bf_string_free(char *s);

// `Z^rank + Z_{torsion[0]} + ...`; the torsion must be a divisor chain of
// integers >= 2.
//
// # Safety
// `torsion` points to `len` values (or is null with `len == 0`); `out` is
// writable.
enum BfStatus bf_group_new(size_t rank,
                           const uint64_t *torsion,
                           size_t len,
                           struct BfGroup **out_group);

// # Safety
// `g` is null or a live group handle.
void bf_group_free(struct BfGroup *g);

// # Safety
// `g` is a live group handle; `out_rank` is writable.
enum BfStatus bf_group_rank(const struct BfGroup *g, size_t *out_rank);

// Number of torsion factors.
//
// # Safety
// `g` is a live group handle; `out_len` is writable.
enum BfStatus bf_group_torsion_len(const struct BfGroup *g, size_t *out_len);

// The `index`-th torsion factor.
//
// # Safety
// `g` is a live group handle; `out_order` is writable.
enum BfStatus bf_group_torsion_at(const struct BfGroup *g, size_t index, uint64_t *out_order);

// Text such as `Z + Z_2`.
//
// # Safety
// `g` is a live group handle; `out_string` is writable.
enum BfStatus bf_group_to_string(const struct BfGroup *g, char **out_string);

// A catalog manifold, `L{p}_{q}`, or a `#`-separated connected sum.
//
// # Safety
// `name` is a nul-terminated string; `out_manifold` is writable.
enum BfStatus bf_manifold_lookup(const char *name, struct BfManifold **out_manifold);

// `L(p, q)`.
//
// # Safety
// `out_manifold` is writable.
enum BfStatus bf_lens_space(uint64_t p, uint64_t q, struct BfManifold **out_manifold);

// `a # b`.
//
// # Safety
// `a` and `b` are live manifold handles; `out_manifold` is writable.
enum BfStatus bf_connected_sum(const struct BfManifold *a,
                               const struct BfManifold *b,
                               struct BfManifold **out_manifold);

// A manifold description or surgery matrix file.
//
// # Safety
// `path` is a nul-terminated string; `out_manifold` is writable.
enum BfStatus bf_manifold_load(const char *path, struct BfManifold **out_manifold);

// # Safety
// `m` is null or a live manifold handle.
void bf_manifold_free(struct BfManifold *m);

// # Safety
// `m` is a live manifold handle; `out_string` is writable.
enum BfStatus bf_manifold_name(const struct BfManifold *m, char **out_string);

// `H_1` as a new group handle.
//
// # Safety
// `m` is a live manifold handle; `out_group` is writable.
enum BfStatus bf_manifold_h1(const struct BfManifold *m, struct BfGroup **out_group);

// The linking form as rows of `num/den` values, `;`-separated, e.g.
// `1/2 0;0 1/2`.
//
// # Safety
// `m` is a live manifold handle; `out_string` is writable.
enum BfStatus bf_manifold_linking_form(const struct BfManifold *m, char **out_string);

// `Z_{BF_k}` from the closed formula, as a decimal string.
//
// # Safety
// `h1` is a live group handle; `out_value` is writable.
enum BfStatus bf_partition(const struct BfGroup *h1,
                           uint64_t k,
                           enum BfConvention convention,
                           char **out_value);

// `Z_{BF_k} = |T| |Hom(G, Z_k)|`, as a decimal string.
//
// # Safety
// `h1` is a live group handle; `out_value` is writable.
enum BfStatus bf_partition_hom(const struct BfGroup *h1,
                               uint64_t k,
                               enum BfConvention convention,
                               char **out_value);

// `Z_{BF_k}` from the census of the support of `delta(k B)`; needs the
// linking form.
//
// # Safety
// `m` is a live manifold handle; `out_value` is writable.
enum BfStatus bf_partition_delta(const struct BfManifold *m,
                                 uint64_t k,
                                 enum BfConvention convention,
                                 char **out_value);

// A chain complex (JSON) or simplicial complex (text) file.
//
// # Safety
// `path` is a nul-terminated string; `out_complex` is writable.
enum BfStatus bf_complex_load(const char *path, struct BfComplex **out_complex);

// The CW complex of `L(p, 1)` with one cell in each degree.
//
// # Safety
// `out_complex` is writable.
enum BfStatus bf_complex_lens_cw(int64_t p, struct BfComplex **out_complex);

// # Safety
// `c` is null or a live complex handle.
void bf_complex_free(struct BfComplex *c);

// `H_q` as a new group handle.
//
// # Safety
// `c` is a live complex handle; `out_group` is writable.
enum BfStatus bf_complex_homology(const struct BfComplex *c, size_t q, struct BfGroup **out_group);

// `|H^q(C; Z_k)|` as a decimal string.
//
// # Safety
// `c` is a live complex handle; `out_value` is writable.
enum BfStatus bf_complex_cohomology_zk_order(const struct BfComplex *c,
                                             size_t q,
                                             uint64_t k,
                                             char **out_value);

// Runs the Gauss-sum suite on groups of order `<= max_order` for
// `k = 1..=max_k`, with at most `forms` forms per group.
//
// # Safety
// `out_passed` is writable.
enum BfStatus bf_verify_gauss(uint64_t max_order,
                              uint64_t max_k,
                              size_t forms,
                              uint64_t seed,
                              bool *out_passed);

// Runs the BF/Chern-Simons suite on all nondegenerate forms of groups of
// order `<= max_order`, for `k = 1..=max_k`.
//
// # Safety
// `out_passed` is writable.
enum BfStatus bf_verify_back_to_cs(uint64_t max_order, uint64_t max_k, bool *out_passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ABELIAN_BF_H */
