#include "omicsel/kernels.hpp"

#include "omicsel/error.hpp"

#include <cstdlib>
#include <string>

namespace omicsel::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

double sum_squares(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

} // namespace scalar

#if defined(OMICSEL_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double sum_squares(const double* a, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
bool host_supported();
} // namespace avx2
#endif

#if defined(OMICSEL_HAVE_NEON)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double sum_squares(const double* a, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
} // namespace neon
#endif

namespace {

struct Dispatch {
    Backend backend;
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*sum_squares)(const double*, std::size_t);
    double (*squared_distance)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
};

constexpr Dispatch kScalar{Backend::scalar, scalar::dot,      scalar::sum,
                           scalar::sum_squares, scalar::squared_distance,
                           scalar::axpy};

bool backend_available(Backend b) {
    switch (b) {
    case Backend::scalar:
        return true;
    case Backend::avx2:
#if defined(OMICSEL_HAVE_AVX2)
        return avx2::host_supported();
#else
        return false;
#endif
    case Backend::neon:
#if defined(OMICSEL_HAVE_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

Dispatch make_dispatch(Backend b) {
    switch (b) {
#if defined(OMICSEL_HAVE_AVX2)
    case Backend::avx2:
        return {Backend::avx2, avx2::dot,      avx2::sum,
                avx2::sum_squares, avx2::squared_distance, avx2::axpy};
#endif
#if defined(OMICSEL_HAVE_NEON)
    case Backend::neon:
        return {Backend::neon, neon::dot,      neon::sum,
                neon::sum_squares, neon::squared_distance, neon::axpy};
#endif
    default:
        return kScalar;
    }
}

Backend pick_default() {
    if (const char* env = std::getenv("OMICSEL_SIMD")) {
        const std::string v(env);
        if (v == "scalar") return Backend::scalar;
        if (v == "avx2" && backend_available(Backend::avx2)) return Backend::avx2;
        if (v == "neon" && backend_available(Backend::neon)) return Backend::neon;
        // "auto" and unrecognized values fall through to detection.
    }
    if (backend_available(Backend::avx2)) return Backend::avx2;
    if (backend_available(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

Dispatch& dispatch() {
    static Dispatch d = make_dispatch(pick_default());
    return d;
}

} // namespace

Backend active_backend() { return dispatch().backend; }

const char* backend_name(Backend b) {
    switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2:   return "avx2";
    case Backend::neon:   return "neon";
    }
    return "unknown";
}

void set_backend(Backend b) {
    if (!backend_available(b))
        throw UsageError(std::string("SIMD backend not available on this host: ") + backend_name(b));
    dispatch() = make_dispatch(b);
}

double dot(const double* a, const double* b, std::size_t n) { return dispatch().dot(a, b, n); }
double sum(const double* a, std::size_t n) { return dispatch().sum(a, n); }
double sum_squares(const double* a, std::size_t n) { return dispatch().sum_squares(a, n); }
double squared_distance(const double* a, const double* b, std::size_t n) {
    return dispatch().squared_distance(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    dispatch().axpy(alpha, x, y, n);
}

} // namespace omicsel::kernels
