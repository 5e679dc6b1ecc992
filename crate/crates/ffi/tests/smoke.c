#include <math.h>
#include <stdio.h>

#include "ergokde.h"

int main(void) {
    double id[4] = {1.0, 0.0, 0.0, 1.0};
    ErgokdePath *path = NULL;
    ErgokdeKernel *kernel = NULL;
    ErgokdeEstimate *est = NULL;
    if (ergokde_simulate_ou(2, id, id, 50.0, 0.01, NULL, -1.0, 3, &path) != ERGOKDE_STATUS_OK) return 1;
    if (ergokde_kernel_new(2, 1, &kernel) != ERGOKDE_STATUS_OK) return 2;
    double lo[2] = {-1.0, -1.0}, hi[2] = {1.0, 1.0};
    if (ergokde_estimate(path, kernel, 0.5, lo, hi, 5, &est) != ERGOKDE_STATUS_OK) return 3;
    size_t n = 0;
    ergokde_estimate_len(est, &n);
    double values[25];
    if (n != 25 || ergokde_estimate_values(est, values, n) != ERGOKDE_STATUS_OK) return 4;
    double h = 0.0;
    if (ergokde_select_bandwidth(path, kernel, 2.0, 1, lo, hi, 5, &h) != ERGOKDE_STATUS_EMPTY_GRID) return 5;
    if (ergokde_last_error() == NULL) return 6;
    printf("%.17g\n", values[12]);
    ergokde_estimate_free(est);
    ergokde_kernel_free(kernel);
    ergokde_path_free(path);
    return isfinite(values[12]) ? 0 : 7;
}
