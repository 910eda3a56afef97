#ifndef GIBBSGEO_H
#define GIBBSGEO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GgStatus {
  GG_STATUS_OK = 0,
  GG_STATUS_NULL_POINTER = 1,
  GG_STATUS_INVALID_ARGUMENT = 2,
  GG_STATUS_DOMAIN = 3,
  GG_STATUS_NO_CONVERGENCE = 4,
  GG_STATUS_SINGULAR_EDGE = 5,
  GG_STATUS_OUT_OF_RANGE = 6,
  GG_STATUS_PANIC = 7,
} GgStatus;

// A solved saturation curve.
typedef struct GgCurve GgCurve;

// Equation-of-state parameters and solver settings.
typedef struct GgModel GgModel;

typedef struct GgState {
  double s;
  double v;
  double u;
  double t;
  double p;
  double mu;
} GgState;

typedef struct GgDerivatives {
  double dt_ds_v;
  double dt_dv_s;
  double dp_ds_v;
  double dp_dv_s;
  double dp_dv_t;
  double ds_dt_v;
  double dp_dt_v;
  double ds_dv_t;
} GgDerivatives;

typedef struct GgCurvature {
  double lambda1;
  double lambda2;
  double gaussian;
  double mean;
} GgCurvature;

// One coexistence pair with first and second derivatives along the curve.
typedef struct GgCoexistence {
  double t;
  double p_sat;
  double mu_sat;
  struct GgState liquid;
  struct GgState vapor;
  double dp_dt;
  double dmu_dt;
  double d2p_dt2;
  double d2mu_dt2;
} GgCoexistence;

typedef struct GgEdgePoint {
  double t;
  double s;
  double v;
  double e;
} GgEdgePoint;

typedef struct GgExponent {
  double exponent;
  double stderr;
  double r_squared;
  size_t n;
} GgExponent;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a model with heat capacity `c` and default solver settings.
//
// # Safety
// `out` must be valid for a pointer write.
enum GgStatus gg_model_new(double c, struct GgModel **out);

// Lowers or raises the smallest temperature the solver accepts.
//
// # Safety
// `model` must come from [`gg_model_new`].
enum GgStatus gg_model_set_t_min(struct GgModel *model, double t_min);

// # Safety
// `model` must come from [`gg_model_new`] and not be used afterwards.
void gg_model_free(struct GgModel *model);

// # Safety
// `model` must be a live handle and `out` valid for a write.
enum GgStatus gg_state_from_tv(const struct GgModel *model,
                               double t,
                               double v,
                               struct GgState *out);

// # Safety
// `model` must be a live handle and `out` valid for a write.
enum GgStatus gg_state_from_sv(const struct GgModel *model,
                               double s,
                               double v,
                               struct GgState *out);

// Closed-form partials at `(T, V)`.
//
// # Safety
// `model` must be a live handle and `out` valid for a write.
enum GgStatus gg_derivatives(const struct GgModel *model,
                             double t,
                             double v,
                             struct GgDerivatives *out);

// Principal, Gaussian and mean curvature of the energy surface at `(T, V)`.
//
// # Safety
// `model` must be a live handle and `out` valid for a write.
enum GgStatus gg_curvature(const struct GgModel *model,
                           double t,
                           double v,
                           struct GgCurvature *out);

// Spinodal volumes at subcritical `t`.
//
// # Safety
// `model` must be a live handle; `v_liquid`, `v_vapor` valid for writes.
enum GgStatus gg_spinodal(const struct GgModel *model, double t, double *v_liquid, double *v_vapor);

// Coexistence at `t`, including second derivatives along the curve.
//
// # Safety
// `model` must be a live handle and `out` valid for a write.
enum GgStatus gg_solve_coexistence(const struct GgModel *model,
                                   double t,
                                   struct GgCoexistence *out);

// Solves the saturation curve on a strictly increasing grid of `n >= 5`
// temperatures.
//
// # Safety
// `temperatures` must hold `n` values; `out` valid for a pointer write.
enum GgStatus gg_curve_scan(const struct GgModel *model,
                            const double *temperatures,
                            size_t n,
                            struct GgCurve **out);

// # Safety
// `curve` must be a live handle and `out` valid for a write.
enum GgStatus gg_curve_len(const struct GgCurve *curve, size_t *out);

// # Safety
// `curve` must be a live handle and `out` valid for a write.
enum GgStatus gg_curve_point(const struct GgCurve *curve, size_t index, struct GgCoexistence *out);

// Point of the edge of regression at any `t` inside the curve's range.
//
// # Safety
// `curve` must be a live handle and `out` valid for a write.
enum GgStatus gg_curve_edge_point(const struct GgCurve *curve, double t, struct GgEdgePoint *out);

// # Safety
// `curve` must come from [`gg_curve_scan`] and not be used afterwards.
void gg_curve_free(struct GgCurve *curve);

// Fits `|value| = A tau^p` over `tau` in `[lo, hi]`.
//
// # Safety
// `tau` and `values` must each hold `n` values; `out` valid for a write.
enum GgStatus gg_fit_power_law(const double *tau,
                               const double *values,
                               size_t n,
                               double lo,
                               double hi,
                               struct GgExponent *out);

// Message of the last failed call on this thread; empty after a success.
// Valid until the next call on the same thread.
const char *gg_last_error_message(void);

// Static name of a status code.
const char *gg_status_name(enum GgStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GIBBSGEO_H */
