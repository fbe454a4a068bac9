#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include <unistd.h>

#include "stress_elast/errors.hpp"

extern "C" {
void dgemm_(const char*, const char*, const int*, const int*, const int*, const double*,
            const double*, const int*, const double*, const int*, const double*, double*,
            const int*);
void dtrsm_(const char*, const char*, const char*, const char*, const int*, const int*,
            const double*, const double*, const int*, double*, const int*);
}

namespace stress_elast {

// Compares BLAS matrix products and triangular solves against plain loops.
inline bool blas_self_check(int n = 128) {
    std::vector<double> a(n * n), b(n * n), c(n * n, 0.0), t(n * n, 0.0);
    for (int i = 0; i < n * n; ++i) {
        a[i] = std::sin(0.37 * i + 0.1);
        b[i] = std::cos(0.91 * i + 0.3);
    }
    const double one = 1.0, zero = 0.0;
    dgemm_("N", "N", &n, &n, &n, &one, a.data(), &n, b.data(), &n, &zero, c.data(), &n);
    double err = 0.0, scale = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += a[i + k * n] * b[k + j * n];
            err = std::max(err, std::abs(s - c[i + j * n]));
            scale = std::max(scale, std::abs(s));
        }
    if (!(err <= 1e-10 * (1.0 + scale))) return false;

    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) t[i + j * n] = i == j ? n : a[i + j * n];
    std::vector<double> x = b;
    dtrsm_("L", "L", "N", "N", &n, &n, &one, t.data(), &n, x.data(), &n);
    err = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int k = 0; k <= i; ++k) s += t[i + k * n] * x[k + j * n];
            err = std::max(err, std::abs(s - b[i + j * n]));
        }
    return err <= 1e-10;
}

// OpenBLAS chooses CPU kernels when it loads; on some virtual CPUs the chosen kernel
// returns wrong products. Restart the process once with a known-good kernel family.
inline void ensure_reliable_blas(char** argv) {
    if (blas_self_check()) return;
    if (std::getenv("STRESS_ELAST_BLAS_RETRY"))
        throw NumericalError("BLAS self-check failed with OPENBLAS_CORETYPE=" +
                             std::string(std::getenv("OPENBLAS_CORETYPE")
                                             ? std::getenv("OPENBLAS_CORETYPE")
                                             : "(unset)"));
    setenv("STRESS_ELAST_BLAS_RETRY", "1", 1);
    if (!std::getenv("OPENBLAS_CORETYPE"))
        setenv("OPENBLAS_CORETYPE", __builtin_cpu_supports("avx512f") ? "SkylakeX" : "Haswell", 1);
    execv("/proc/self/exe", argv);
    throw NumericalError("BLAS self-check failed and the process could not be restarted");
}

} // namespace stress_elast
