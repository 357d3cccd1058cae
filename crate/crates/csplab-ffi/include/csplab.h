#ifndef CSPLAB_H
#define CSPLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define CSPLAB_OK 0

#define CSPLAB_ERR_INPUT 1

#define CSPLAB_ERR_CAPACITY 2

#define CSPLAB_ERR_PARSE 3

#define CSPLAB_ERR_IO 4

#define CSPLAB_ERR_INTERNAL 5

#define CSPLAB_ERR_NULL 6

#define CSPLAB_ERR_UTF8 7

#define CSPLAB_SAT 1

#define CSPLAB_UNSAT 0

#define CSPLAB_BUDGET_EXCEEDED 2

#define CSPLAB_FLAVOR_PLAIN 0

#define CSPLAB_FLAVOR_HAT 1

#define CSPLAB_AUDIT_ALL_SATISFIABLE 0

#define CSPLAB_AUDIT_COUNTEREXAMPLE 1

/**
 * Opaque constraint distribution handle.
 */
typedef struct CsplabDist CsplabDist;

/**
 * Opaque CSP instance handle.
 */
typedef struct CsplabInstance CsplabInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the message of the most recent error on this thread into `buf`
 * (NUL-terminated, truncated to `len`). Returns the full message length.
 */
size_t csplab_last_error(char *buf, size_t len);

/**
 * Parse a model expression (`ed3`, `s3:<q>`, `dkt:<d>,<k>,<t>`,
 * `coloring:<d>`, `hom:<path>`, `file:<path>`) into a distribution handle.
 */
int csplab_dist_parse(const char *expr, struct CsplabDist **out);

void csplab_dist_free(struct CsplabDist *dist);

/**
 * Domain size of the distribution, or -1 on a null handle.
 */
int csplab_dist_d(const struct CsplabDist *dist);

/**
 * Constraint arity of the distribution, or -1 on a null handle.
 */
int csplab_dist_k(const struct CsplabDist *dist);

/**
 * Sample one random instance at density c. `flavor` is
 * CSPLAB_FLAVOR_PLAIN or CSPLAB_FLAVOR_HAT; (seed, trial) pin the
 * pseudorandom substream.
 */
int csplab_sample(const struct CsplabDist *dist,
                  size_t n,
                  double c,
                  int flavor,
                  uint64_t seed,
                  uint64_t trial,
                  struct CsplabInstance **out);

/**
 * Parse the textual instance format (`CSPINST 1` header).
 */
int csplab_instance_read(const char *text, struct CsplabInstance **out);

/**
 * Serialize the instance; the returned string must be released with
 * csplab_string_free.
 */
int csplab_instance_write(const struct CsplabInstance *inst, char **out);

void csplab_string_free(char *s);

void csplab_instance_free(struct CsplabInstance *inst);

/**
 * Number of variables, or -1 on a null handle.
 */
int csplab_instance_n(const struct CsplabInstance *inst);

/**
 * Number of constrained tuples, or -1 on a null handle.
 */
int csplab_instance_edges(const struct CsplabInstance *inst);

/**
 * Exact satisfiability within `budget` search nodes. On success `*status`
 * is CSPLAB_SAT, CSPLAB_UNSAT, or CSPLAB_BUDGET_EXCEEDED; when SAT and
 * `witness` is non-null it must point at `n` bytes and receives the
 * 1-based satisfying values.
 */
int csplab_solve(const struct CsplabInstance *inst, uint64_t budget, int *status, uint8_t *witness);

/**
 * Decide whether every tree or unicyclic instance over the distribution's
 * support is satisfiable. On success `*verdict` is
 * CSPLAB_AUDIT_ALL_SATISFIABLE or CSPLAB_AUDIT_COUNTEREXAMPLE; in the
 * latter case a minimal witness instance is returned through `witness`
 * when that pointer is non-null.
 */
int csplab_audit_binary(const struct CsplabDist *dist,
                        int *verdict,
                        struct CsplabInstance **witness);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CSPLAB_H */
