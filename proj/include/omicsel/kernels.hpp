#pragma once

#include <cstddef>
#include <string>

// Dense double-precision inner loops shared by the solvers, distance code,
// and preprocessing reductions. Every kernel has a scalar reference
// implementation and, where the host supports it, a SIMD variant selected
// once at startup. SIMD variants accumulate in multiple lanes, so results
// may differ from the scalar reference in the last few ulps; the equivalence
// tests bound that difference.
namespace omicsel::kernels {

enum class Backend { scalar, avx2, neon };

// Active backend. Chosen from CPU capabilities at first use; the environment
// variable OMICSEL_SIMD=scalar|avx2|neon|auto overrides the choice.
Backend active_backend();
const char* backend_name(Backend b);

// Force a backend (used by the equivalence tests). Throws UsageError if the
// host cannot run it.
void set_backend(Backend b);

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double sum_squares(const double* a, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

// Scalar reference implementations, always available (oracles for the
// equivalence tests).
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double sum_squares(const double* a, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
} // namespace scalar

} // namespace omicsel::kernels
