#include <math.h>
#include <stdio.h>
#include "weakdisc.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            char msg[256];                                            \
            wd_last_error_message(msg, sizeof msg);                   \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond, msg); \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    double p = 0.0;
    CHECK(wd_idp_limit_eta(0.01, 0.0, &p) == WD_STATUS_OK);
    CHECK(fabs(p - 9.998500249956258e-5) < 1e-18);

    CHECK(wd_overall_success_approx(0.5, 0.0, 0.1, &p) == WD_STATUS_REGIME);
    CHECK(wd_last_error_message(NULL, 0) > 0);

    WdPovm *povm = NULL;
    CHECK(wd_povm_weak(1e-3, 0.05, 0.0, 0.0, &povm) == WD_STATUS_OK);
    double m[8];
    CHECK(wd_povm_element(povm, 1, m) == WD_STATUS_OK);
    CHECK(fabs(m[0] - 1.0 / (4.0 - 1e-6 / 0.0025) * 2.0) < 1e-15);
    CHECK(wd_povm_element(povm, 3, m) == WD_STATUS_INVALID_ARGUMENT);
    wd_povm_free(povm);

    WdMcSummary s;
    CHECK(wd_mc_average_beta(1e-3, 0.05, 1e-3, 20000, 7, WD_SAMPLING_UNIFORM_ANGLE, &s) == WD_STATUS_OK);
    CHECK(s.sample_count == 20000 && fabs(s.mean_beta_a - 3.0) < 5.0 * s.std_error_a);

    double beta = 0.0;
    CHECK(wd_beta_a(1e-3, 0.0, 0.0, &beta) == WD_STATUS_OK && isinf(beta));

    WdConfig *cfg = NULL;
    CHECK(wd_config_from_json("{\"eta\":[0.001,0],\"g\":0.05,\"eps\":0.001,\"delta_n_mag\":0,"
                              "\"delta_f_mag\":0.001,\"samples\":100,\"seed\":1,"
                              "\"sweep\":{\"param\":\"g\",\"start\":0.001,\"stop\":0.3,\"count\":4}}",
                              &cfg) == WD_STATUS_OK);
    WdRows *rows = NULL;
    CHECK(wd_run_sweep(cfg, &rows) == WD_STATUS_OK);
    size_t n = 0;
    CHECK(wd_rows_len(rows, &n) == WD_STATUS_OK && n == 4);
    CHECK(wd_rows_value(rows, 0, "mean_beta_b", &p) == WD_STATUS_MISSING_VALUE);
    CHECK(wd_rows_value(rows, 3, "p_exact", &p) == WD_STATUS_OK && p > 0.0);
    wd_rows_free(rows);
    wd_config_free(cfg);

    CHECK(wd_config_from_json("{\"eta\":[0,0],\"gg\":1}", &cfg) == WD_STATUS_CONFIG);
    printf("weakdisc %s ok\n", wd_version());
    return 0;
}
