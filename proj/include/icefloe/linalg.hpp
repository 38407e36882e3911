#pragma once

#include <cstddef>
#include <vector>

namespace icefloe {

using Vec = std::vector<double>;

// Row-major dense matrix. Small and deliberately plain: every matrix in
// this project is at most a few hundred rows on a side.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0)
        : rows(r), cols(c), a(std::size_t(r) * std::size_t(c), fill) {}

    double& operator()(int r, int c) { return a[std::size_t(r) * cols + c]; }
    double operator()(int r, int c) const { return a[std::size_t(r) * cols + c]; }
    double* row(int r) { return a.data() + std::size_t(r) * cols; }
    const double* row(int r) const { return a.data() + std::size_t(r) * cols; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);
bool approx_equal(const Mat& a, const Mat& b, double tol);

// In-place Cholesky solve of the SPD system s * x = b (b holds the answer
// on return). Returns false when s is not positive definite.
bool cholesky_solve(Mat s, Mat& b);

// Cyclic Jacobi eigendecomposition of a symmetric matrix:
// a = vectors * diag(values) * vectors^T. Returns false if the sweep
// limit is hit before off-diagonals vanish.
bool jacobi_eigensymm(Mat a, Mat& vectors, Vec& values, int max_sweeps = 64);

}  // namespace icefloe
