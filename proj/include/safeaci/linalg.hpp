#ifndef SAFEACI_LINALG_HPP
#define SAFEACI_LINALG_HPP

#include <cstddef>
#include <vector>

// Small dense linear algebra on top of the kern backends. Sizes here are
// tiny (state dim 4, feature count ~30), so everything is plain row-major
// storage and direct algorithms; no pivot-heavy general solvers.

namespace safeaci {

using Vec = std::vector<double>;

class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), d_(rows * cols, fill) {}

    static Mat identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return d_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

    double* data() { return d_.data(); }
    const double* data() const { return d_.data(); }

    bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    Vec d_;
};

// ---- vector helpers ----
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);           // Euclidean norm
double norm_inf(const Vec& a);
void axpy(double alpha, const Vec& x, Vec& y);  // y += alpha x
void scale(double alpha, Vec& x);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scaled(const Vec& a, double alpha);
bool all_finite(const Vec& a);

// ---- matrix helpers ----
Vec matvec(const Mat& a, const Vec& x);                // A x
void matvec_into(const Mat& a, const Vec& x, Vec& y);
Vec tmatvec(const Mat& a, const Vec& x);               // A^T x
void tmatvec_into(const Mat& a, const Vec& x, Vec& y);
Mat matmul(const Mat& a, const Mat& b);
void matmul_into(const Mat& a, const Mat& b, Mat& c);     // C = A B
void matmul_nt_into(const Mat& a, const Mat& b, Mat& c);  // C = A B^T
Mat transpose(const Mat& a);
void fill(Vec& a, double v);
void fill(Mat& a, double v);
void mat_axpy(double alpha, const Mat& x, Mat& y);     // Y += alpha X
void mat_scale(double alpha, Mat& x);
void ger(double alpha, const Vec& x, const Vec& y, Mat& a);  // A += alpha x y^T
double fro_norm(const Mat& a);
double fro_dot(const Mat& a, const Mat& b);
bool all_finite(const Mat& a);
void symmetrize(Mat& a);              // A <- (A + A^T)/2

// Cholesky factor of a symmetric matrix; returns false when A is not
// positive definite. L is lower triangular, resized by the caller.
bool cholesky(const Mat& a, Mat& l);
bool is_positive_definite(const Mat& a, Mat& scratch);

Vec forward_subst(const Mat& l, const Vec& b);  // solve L y = b
Vec back_subst_t(const Mat& l, const Vec& b);   // solve L^T x = b

// Inverse of a symmetric positive definite matrix via Cholesky. Throws
// NumericError when the factorization fails.
Mat spd_inverse(const Mat& a);

// Eigenvalues of a symmetric matrix by cyclic Jacobi, ascending.
Vec sym_eigenvalues(Mat a);
void sym_eig_range(const Mat& a, double& emin, double& emax);

// Largest singular value. Forms the smaller Gram matrix, so intended for
// small a.
double spectral_norm(const Mat& a);

}  // namespace safeaci

#endif
