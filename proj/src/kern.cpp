#include "safeaci/kern.hpp"

#include <atomic>
#include <cstdlib>

#include "safeaci/errors.hpp"

namespace safeaci::kern {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal_scalar(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void matvec_scalar(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i)
        y[i] = dot_scalar(a + i * cols, x, cols);
}

void tmatvec_scalar(const double* a, std::size_t rows, std::size_t cols,
                    const double* x, double* y) {
    for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
    for (std::size_t i = 0; i < rows; ++i)
        axpy_scalar(x[i], a + i * cols, y, cols);
}

void ger_scalar(double alpha, const double* x, std::size_t rows,
                const double* y, std::size_t cols, double* a) {
    for (std::size_t i = 0; i < rows; ++i)
        axpy_scalar(alpha * x[i], y, a + i * cols, cols);
}

const Ops kScalarOps = {
    "scalar",     dot_scalar,     axpy_scalar,
    scal_scalar,  matvec_scalar,  tmatvec_scalar,
    ger_scalar,
};

std::atomic<const Ops*> g_active{nullptr};

const Ops* resolve(const std::string& name) {
    if (name == "scalar") return &scalar_ops();
    if (name == "avx2") {
        const Ops* ops = avx2_ops_or_null();
        if (!ops)
            throw ConfigError("SIMD backend 'avx2' is not available on this machine");
        return ops;
    }
    if (name == "auto") {
        const Ops* ops = avx2_ops_or_null();
        return ops ? ops : &scalar_ops();
    }
    throw ConfigError("unknown SIMD backend '" + name +
                      "' (expected scalar, avx2 or auto)");
}

const Ops* initial_backend() {
    const char* env = std::getenv("SAFEACI_SIMD");
    return resolve(env && *env ? env : "auto");
}

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

void set_backend(const std::string& name) {
    g_active.store(resolve(name), std::memory_order_relaxed);
}

const Ops& active() {
    const Ops* ops = g_active.load(std::memory_order_relaxed);
    if (!ops) {
        ops = initial_backend();
        g_active.store(ops, std::memory_order_relaxed);
    }
    return *ops;
}

std::vector<const Ops*> available_backends() {
    std::vector<const Ops*> out{&scalar_ops()};
    if (const Ops* ops = avx2_ops_or_null()) out.push_back(ops);
    return out;
}

#ifndef SAFEACI_HAVE_AVX2
const Ops* avx2_ops_or_null() { return nullptr; }
#endif

}  // namespace safeaci::kern
