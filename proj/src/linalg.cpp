#include "safeaci/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "safeaci/errors.hpp"
#include "safeaci/kern.hpp"

namespace safeaci {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DimensionError(std::string("linalg: ") + what);
}

}  // namespace

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double dot(const Vec& a, const Vec& b) {
    require(a.size() == b.size(), "dot size mismatch");
    return kern::dot(a.data(), b.data(), a.size());
}

double norm2(const Vec& a) {
    return std::sqrt(kern::dot(a.data(), a.data(), a.size()));
}

double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

void axpy(double alpha, const Vec& x, Vec& y) {
    require(x.size() == y.size(), "axpy size mismatch");
    kern::axpy(alpha, x.data(), y.data(), x.size());
}

void scale(double alpha, Vec& x) { kern::scal(alpha, x.data(), x.size()); }

Vec add(const Vec& a, const Vec& b) {
    Vec out = a;
    axpy(1.0, b, out);
    return out;
}

Vec sub(const Vec& a, const Vec& b) {
    Vec out = a;
    axpy(-1.0, b, out);
    return out;
}

Vec scaled(const Vec& a, double alpha) {
    Vec out = a;
    scale(alpha, out);
    return out;
}

bool all_finite(const Vec& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

void matvec_into(const Mat& a, const Vec& x, Vec& y) {
    require(a.cols() == x.size(), "matvec size mismatch");
    y.resize(a.rows());
    kern::matvec(a.data(), a.rows(), a.cols(), x.data(), y.data());
}

Vec matvec(const Mat& a, const Vec& x) {
    Vec y;
    matvec_into(a, x, y);
    return y;
}

void tmatvec_into(const Mat& a, const Vec& x, Vec& y) {
    require(a.rows() == x.size(), "tmatvec size mismatch");
    y.resize(a.cols());
    kern::tmatvec(a.data(), a.rows(), a.cols(), x.data(), y.data());
}

Vec tmatvec(const Mat& a, const Vec& x) {
    Vec y;
    tmatvec_into(a, x, y);
    return y;
}

void matmul_into(const Mat& a, const Mat& b, Mat& c) {
    require(a.cols() == b.rows(), "matmul size mismatch");
    if (c.rows() != a.rows() || c.cols() != b.cols()) c = Mat(a.rows(), b.cols());
    std::fill(c.data(), c.data() + c.size(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k)
            kern::axpy(a(i, k), b.data() + k * b.cols(),
                       c.data() + i * c.cols(), b.cols());
}

Mat matmul(const Mat& a, const Mat& b) {
    Mat c;
    matmul_into(a, b, c);
    return c;
}

void matmul_nt_into(const Mat& a, const Mat& b, Mat& c) {
    require(a.cols() == b.cols(), "matmul_nt size mismatch");
    if (c.rows() != a.rows() || c.cols() != b.rows()) c = Mat(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j)
            c(i, j) = kern::dot(a.data() + i * a.cols(), b.data() + j * b.cols(),
                                a.cols());
}

Mat transpose(const Mat& a) {
    Mat t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

void fill(Vec& a, double v) { std::fill(a.begin(), a.end(), v); }

void fill(Mat& a, double v) { std::fill(a.data(), a.data() + a.size(), v); }

void mat_axpy(double alpha, const Mat& x, Mat& y) {
    require(x.same_shape(y), "mat_axpy shape mismatch");
    kern::axpy(alpha, x.data(), y.data(), x.size());
}

void mat_scale(double alpha, Mat& x) { kern::scal(alpha, x.data(), x.size()); }

void ger(double alpha, const Vec& x, const Vec& y, Mat& a) {
    require(a.rows() == x.size() && a.cols() == y.size(), "ger shape mismatch");
    kern::ger(alpha, x.data(), x.size(), y.data(), y.size(), a.data());
}

double fro_norm(const Mat& a) {
    return std::sqrt(kern::dot(a.data(), a.data(), a.size()));
}

double fro_dot(const Mat& a, const Mat& b) {
    require(a.same_shape(b), "fro_dot shape mismatch");
    return kern::dot(a.data(), b.data(), a.size());
}

bool all_finite(const Mat& a) {
    const double* p = a.data();
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!std::isfinite(p[i])) return false;
    return true;
}

void symmetrize(Mat& a) {
    require(a.rows() == a.cols(), "symmetrize needs square");
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = v;
            a(j, i) = v;
        }
}

bool cholesky(const Mat& a, Mat& l) {
    require(a.rows() == a.cols(), "cholesky needs square");
    const std::size_t n = a.rows();
    l = Mat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j) - kern::dot(l.data() + j * n, l.data() + j * n, j);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        double lj = std::sqrt(d);
        l(j, j) = lj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j) - kern::dot(l.data() + i * n, l.data() + j * n, j);
            l(i, j) = s / lj;
        }
    }
    return true;
}

bool is_positive_definite(const Mat& a, Mat& scratch) {
    return cholesky(a, scratch);
}

Vec forward_subst(const Mat& l, const Vec& b) {
    require(l.rows() == l.cols() && l.rows() == b.size(), "forward_subst size mismatch");
    const std::size_t n = b.size();
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i] - kern::dot(l.data() + i * n, y.data(), i);
        y[i] = s / l(i, i);
    }
    return y;
}

Vec back_subst_t(const Mat& l, const Vec& b) {
    require(l.rows() == l.cols() && l.rows() == b.size(), "back_subst_t size mismatch");
    const std::size_t n = b.size();
    Vec x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

Mat spd_inverse(const Mat& a) {
    Mat l;
    if (!cholesky(a, l))
        throw NumericError("spd_inverse: matrix is not positive definite");
    const std::size_t n = a.rows();
    Mat inv(n, n);
    Vec e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        Vec col = back_subst_t(l, forward_subst(l, e));
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
        e[j] = 0.0;
    }
    symmetrize(inv);
    return inv;
}

// Cyclic Jacobi. Rotations kill off-diagonal mass quadratically; for the
// sizes here a handful of sweeps reaches machine precision.
Vec sym_eigenvalues(Mat a) {
    require(a.rows() == a.cols(), "sym_eigenvalues needs square");
    const std::size_t n = a.rows();
    if (n == 0) return {};
    if (n == 1) return {a(0, 0)};

    auto off = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return s;
    };
    double fro = fro_norm(a);
    const double tol = 1e-30 * fro * fro + 1e-300;

    for (int sweep = 0; sweep < 64 && off() > tol; ++sweep) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (apq == 0.0) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }

    Vec ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

void sym_eig_range(const Mat& a, double& emin, double& emax) {
    Vec ev = sym_eigenvalues(a);
    emin = ev.front();
    emax = ev.back();
}

double spectral_norm(const Mat& a) {
    // sigma_max(A)^2 = lambda_max of the smaller of A^T A and A A^T.
    const bool wide = a.rows() >= a.cols();
    const std::size_t k = wide ? a.cols() : a.rows();
    Mat gram(k, k);
    if (wide) {
        for (std::size_t i = 0; i < a.rows(); ++i)
            kern::ger(1.0, a.data() + i * a.cols(), a.cols(),
                      a.data() + i * a.cols(), a.cols(), gram.data());
    } else {
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                gram(i, j) = kern::dot(a.data() + i * a.cols(),
                                       a.data() + j * a.cols(), a.cols());
    }
    Vec ev = sym_eigenvalues(std::move(gram));
    return std::sqrt(std::max(0.0, ev.back()));
}

}  // namespace safeaci
