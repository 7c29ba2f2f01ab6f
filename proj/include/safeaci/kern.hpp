#ifndef SAFEACI_KERN_HPP
#define SAFEACI_KERN_HPP

#include <cstddef>
#include <string>
#include <vector>

// Dense double-precision kernels that carry the hot loops of the learner and
// simulator. A scalar reference backend always exists; on x86-64 an AVX2+FMA
// backend is compiled as well and picked at runtime when the CPU supports it.
// Override with SAFEACI_SIMD=scalar|avx2|auto or kern::set_backend().
//
// Matrices are row-major with no padding.

namespace safeaci::kern {

struct Ops {
    const char* name;
    // sum_i a[i]*b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha*x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // x *= alpha
    void (*scal)(double alpha, double* x, std::size_t n);
    // y = A x       (A rows x cols)
    void (*matvec)(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y);
    // y = A^T x
    void (*tmatvec)(const double* a, std::size_t rows, std::size_t cols,
                    const double* x, double* y);
    // A += alpha * x y^T
    void (*ger)(double alpha, const double* x, std::size_t rows,
                const double* y, std::size_t cols, double* a);
};

const Ops& scalar_ops();

// Null when the binary was built without AVX2 support or the CPU lacks it.
const Ops* avx2_ops_or_null();

// "scalar", "avx2" or "auto". Throws ConfigError for unknown names or when a
// requested backend is unavailable on this machine.
void set_backend(const std::string& name);

// Active backend, resolved once from SAFEACI_SIMD (default "auto").
const Ops& active();

// Backends usable on this machine, for equivalence tests.
std::vector<const Ops*> available_backends();

inline double dot(const double* a, const double* b, std::size_t n) {
    return active().dot(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
    active().axpy(alpha, x, y, n);
}
inline void scal(double alpha, double* x, std::size_t n) {
    active().scal(alpha, x, n);
}
inline void matvec(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
    active().matvec(a, rows, cols, x, y);
}
inline void tmatvec(const double* a, std::size_t rows, std::size_t cols,
                    const double* x, double* y) {
    active().tmatvec(a, rows, cols, x, y);
}
inline void ger(double alpha, const double* x, std::size_t rows,
                const double* y, std::size_t cols, double* a) {
    active().ger(alpha, x, rows, y, cols, a);
}

}  // namespace safeaci::kern

#endif
