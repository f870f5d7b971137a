#include <stdio.h>
#include <string.h>
#include "fewbody.h"

static const char *CONFIG =
    "[model]\n"
    "masses = 1, 1, 1\n"
    "[model.pair12]\n"
    "kind = square_well\n"
    "depth = 1\n"
    "range = 1\n"
    "coupling = 1\n"
    "[numerics]\n"
    "radial_nodes = 48\n";

int main(void) {
    FbModel *m = NULL;
    if (fb_model_from_config(CONFIG, &m) != FB_STATUS_OK) {
        fprintf(stderr, "%s\n", fb_last_error_message());
        return 1;
    }
    double lambda = 0.0;
    if (fb_two_body_threshold(m, 12, &lambda) != FB_STATUS_OK) {
        return 2;
    }
    char hash[65];
    if (fb_config_hash(m, hash, sizeof hash) != FB_STATUS_OK || strlen(hash) != 64) {
        return 3;
    }
    if (fb_two_body_threshold(m, 99, &lambda) != FB_STATUS_INVALID_ARGUMENT) {
        return 4;
    }
    fb_model_free(m);
    printf("%.12f\n", lambda);
    return 0;
}
