/* H1 of the Trepalin lattices over the whole group, through the C ABI. */
#include <stdio.h>

#include "glat.h"

int main(void) {
    for (uint32_t n = 1; n <= 3; n++) {
        GlatLattice *lat = NULL;
        if (glat_lattice_gallery("trepalin", n, &lat) != GLAT_STATUS_OK) {
            fprintf(stderr, "%s\n", glat_last_error_message());
            return 1;
        }
        size_t count = 0, len = 0;
        int64_t factors[16];
        glat_lattice_subgroup_count(lat, &count);
        if (glat_h1_invariant_factors(lat, count - 1, false, factors, 16, &len) != GLAT_STATUS_OK) {
            fprintf(stderr, "%s\n", glat_last_error_message());
            return 1;
        }
        printf("n=%u H1(W) = (", n);
        for (size_t i = 0; i < len; i++) {
            printf(i ? ",%lld" : "%lld", (long long)factors[i]);
        }
        printf(")\n");
        glat_lattice_free(lat);
    }

    GlatLattice *bad = NULL;
    GlatStatus st = glat_lattice_from_json("{", &bad);
    printf("parse status %d: %s\n", (int)st, glat_last_error_message());
    return st == GLAT_STATUS_PARSE_ERROR ? 0 : 1;
}
