/* C interface to the projumb library: projective umbilics of polynomial
 * surfaces z = f(x,y), their invariants, and family sweeps.
 *
 * Handles are opaque and immutable; every function may be called from any
 * thread. Functions return a pu_status; on failure pu_last_error() holds a
 * message for the calling thread. Strings returned through char** out
 * parameters are owned by the caller and released with pu_string_free(). */

#ifndef PROJUMB_H
#define PROJUMB_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PU_API __declspec(dllexport)
#else
#define PU_API __attribute__((visibility("default")))
#endif

typedef enum pu_status {
  PU_OK = 0,
  PU_ERR_DEGREE_OVERFLOW = 1,
  PU_ERR_INVALID_TRANSFORM = 2,
  PU_ERR_CHART_FAILURE = 3,
  PU_ERR_DEGENERATE_POINT = 4,
  PU_ERR_LABEL_FAILURE = 5,
  PU_ERR_NOT_ADAPTED = 6,
  PU_ERR_INDETERMINATE = 7,
  PU_ERR_PRECONDITION = 8,
  PU_ERR_NORMALIZATION = 9,
  PU_ERR_NOT_A_NODE = 10,
  PU_ERR_NON_GENERIC = 11,
  PU_ERR_REFINEMENT = 12,
  PU_ERR_BIFLECNODE_DEGENERATE = 13,
  PU_ERR_DEGENERATE_INDEX = 14,
  PU_ERR_COVERAGE = 15,
  PU_ERR_PARSE = 16,
  PU_ERR_INVALID_ARGUMENT = 17,
  PU_ERR_INTERNAL = 100
} pu_status;

typedef struct pu_surface pu_surface;
typedef struct pu_family pu_family;

typedef struct pu_window {
  double xmin, xmax, ymin, ymax;
} pu_window;

/* Node kinds for pu_nodes. */
enum { PU_HYPERBONODES = 1, PU_ELLIPNODES = 2 };

PU_API const char* pu_version(void);
PU_API const char* pu_status_name(pu_status status);
/* Message of the last failure on this thread; "" when none. */
PU_API const char* pu_last_error(void);
PU_API void pu_string_free(char* s);

/* {"degree": n, "terms": [[i, j, c], ...]} */
PU_API pu_status pu_surface_from_json(const char* json, pu_surface** out);
PU_API pu_status pu_surface_to_json(const pu_surface* surface, char** out_json);
PU_API void pu_surface_free(pu_surface* surface);

/* {"degree": n, "terms": [[i, j, [c0, c1, ...]], ...]} */
PU_API pu_status pu_family_from_json(const char* json, pu_family** out);
PU_API pu_status pu_family_at(const pu_family* family, double t, pu_surface** out);
PU_API void pu_family_free(pu_family* family);

/* tol_scale multiplies every numerical tolerance; 1 keeps the defaults. */

/* Point class, asymptotic directions and their left/right labels. */
PU_API pu_status pu_classify(const pu_surface* surface, double x, double y, double tol_scale,
                             char** out_json);

/* Parabolic and flecnodal curves plus the domain components as JSON, and
 * optionally (out_svg != NULL) the SVG figure of the curves. */
PU_API pu_status pu_trace(const pu_surface* surface, pu_window window, int grid, double tol_scale,
                          char** out_json, char** out_svg);

/* Node list; `kinds` is a mask of PU_HYPERBONODES and PU_ELLIPNODES. */
PU_API pu_status pu_nodes(const pu_surface* surface, pu_window window, int grid, int kinds,
                          double tol_scale, char** out_json);

/* Refines the node nearest to (x, y) and reports rho, parity and index. */
PU_API pu_status pu_invariant(const pu_surface* surface, double x, double y, double tol_scale,
                              char** out_json);

/* SVG figure with curves, shaded hyperbolic domain and nodes. */
PU_API pu_status pu_plot(const pu_surface* surface, pu_window window, int grid, double tol_scale,
                         char** out_svg);

/* Sweep of t in [t0, t1] with `steps` samples. out_transitions may be NULL. */
PU_API pu_status pu_sweep(const pu_family* family, pu_window window, int grid, double t0, double t1,
                          int steps, double tol_scale, char** out_csv, char** out_transitions);

/* Runs the builtin verification suite. The report has one line per
 * criterion; *all_passed is set to 1 when every criterion passed. */
PU_API pu_status pu_verify_builtin(char** out_report, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* PROJUMB_H */
