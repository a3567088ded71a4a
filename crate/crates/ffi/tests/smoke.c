#include <stdio.h>
#include <string.h>
#include "cone2d.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    Cone2dPolynomial *p = NULL;
    const char *f = "{\"n\":1,\"terms\":[{\"coeff\":\"1\",\"exp\":[0]},{\"coeff\":\"-1\",\"exp\":[2]}]}";
    CHECK(cone2d_polynomial_from_json(f, &p) == CONE2D_STATUS_OK);

    double x = 0.5, v = 0.0;
    CHECK(cone2d_polynomial_eval(p, &x, 1, &v) == CONE2D_STATUS_OK);
    CHECK(v == 0.75);

    double pts[] = {0.0, 2.0};
    char *cert = NULL;
    CHECK(cone2d_tk_approximate(p, pts, 2, 1, 1, 1e-3, &cert) == CONE2D_STATUS_NOT_MEMBER);
    CHECK(cert == NULL);
    CHECK(strstr(cone2d_last_error(), "not nonnegative") != NULL);

    pts[1] = 0.5;
    CHECK(cone2d_tk_approximate(p, pts, 2, 1, 2, 1e-3, &cert) == CONE2D_STATUS_OK);
    CHECK(strstr(cert, "\"success\":true") != NULL);
    cone2d_string_free(cert);

    Cone2dPolynomial *bad = NULL;
    CHECK(cone2d_polynomial_from_json("{\"n\":1,", &bad) == CONE2D_STATUS_PARSE);
    CHECK(bad == NULL);

    cone2d_polynomial_free(p);
    printf("ok %s\n", cone2d_version());
    return 0;
}
