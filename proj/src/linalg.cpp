#include "icefloe/linalg.hpp"

#include <cmath>

#include "icefloe/errors.hpp"

namespace icefloe {

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols != b.rows) throw DimensionMismatch("matmul: inner dimensions differ");
    Mat c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.row(k);
            double* crow = c.row(i);
            for (int j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Mat transpose(const Mat& a) {
    Mat t(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

bool approx_equal(const Mat& a, const Mat& b, double tol) {
    if (a.rows != b.rows || a.cols != b.cols) return false;
    for (std::size_t i = 0; i < a.a.size(); ++i)
        if (std::abs(a.a[i] - b.a[i]) > tol) return false;
    return true;
}

bool cholesky_solve(Mat s, Mat& b) {
    const int n = s.rows;
    if (s.cols != n || b.rows != n) throw DimensionMismatch("cholesky_solve: shapes");
    // factor s = L L^T in the lower triangle
    for (int j = 0; j < n; ++j) {
        double d = s(j, j);
        for (int k = 0; k < j; ++k) d -= s(j, k) * s(j, k);
        if (!(d > 0.0)) return false;
        const double ljj = std::sqrt(d);
        s(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            double v = s(i, j);
            for (int k = 0; k < j; ++k) v -= s(i, k) * s(j, k);
            s(i, j) = v / ljj;
        }
    }
    // forward then backward substitution on every column of b
    for (int c = 0; c < b.cols; ++c) {
        for (int i = 0; i < n; ++i) {
            double v = b(i, c);
            for (int k = 0; k < i; ++k) v -= s(i, k) * b(k, c);
            b(i, c) = v / s(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            double v = b(i, c);
            for (int k = i + 1; k < n; ++k) v -= s(k, i) * b(k, c);
            b(i, c) = v / s(i, i);
        }
    }
    return true;
}

bool jacobi_eigensymm(Mat a, Mat& vectors, Vec& values, int max_sweeps) {
    const int n = a.rows;
    if (a.cols != n) throw DimensionMismatch("jacobi_eigensymm: square input required");
    vectors = Mat::identity(n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-26 * double(n) * double(n)) {
            values.assign(n, 0.0);
            for (int i = 0; i < n; ++i) values[i] = a(i, i);
            return true;
        }
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = vectors(k, p), vkq = vectors(k, q);
                    vectors(k, p) = c * vkp - s * vkq;
                    vectors(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    return false;
}

}  // namespace icefloe
