#include <math.h>
#include <stdio.h>
#include <string.h>

#include "gibbsgeo.h"

#define CHECK(cond)                                            \
    do {                                                       \
        if (!(cond)) {                                         \
            fprintf(stderr, "line %d: %s\n", __LINE__, #cond); \
            return 1;                                          \
        }                                                      \
    } while (0)

int main(void) {
    GgModel *model = NULL;
    CHECK(gg_model_new(1.5, &model) == GG_STATUS_OK);

    GgCoexistence pt;
    CHECK(gg_solve_coexistence(model, 0.9, &pt) == GG_STATUS_OK);
    CHECK(fabs(pt.p_sat - 0.24262438195209418) < 1e-12);
    CHECK(pt.liquid.v < pt.vapor.v);

    double grid[8];
    for (int i = 0; i < 8; i++) grid[i] = 0.8 + 0.02 * i;
    GgCurve *curve = NULL;
    CHECK(gg_curve_scan(model, grid, 8, &curve) == GG_STATUS_OK);
    size_t n = 0;
    CHECK(gg_curve_len(curve, &n) == GG_STATUS_OK && n == 8);
    GgEdgePoint e;
    CHECK(gg_curve_edge_point(curve, 0.85, &e) == GG_STATUS_OK);
    CHECK(gg_curve_edge_point(curve, 0.99, &e) == GG_STATUS_OUT_OF_RANGE);
    CHECK(strlen(gg_last_error_message()) > 0);
    CHECK(strcmp(gg_status_name(GG_STATUS_OUT_OF_RANGE), "out_of_range") == 0);
    gg_curve_free(curve);

    CHECK(gg_spinodal(model, 1.2, &e.v, &e.s) == GG_STATUS_DOMAIN);
    CHECK(gg_model_new(1.5, NULL) == GG_STATUS_NULL_POINTER);
    gg_model_free(model);
    puts("ok");
    return 0;
}
