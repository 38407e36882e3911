#include "icefloe/kernels.hpp"

#include "icefloe/errors.hpp"

namespace icefloe::kernels {

void affine(const Mat& a, const Mat& w, const Vec& bias, Mat& c, Exec mode) {
    if (a.cols != w.rows || int(bias.size()) != w.cols)
        throw DimensionMismatch("affine: shapes");
    c.rows = a.rows;
    c.cols = w.cols;
    c.a.resize(std::size_t(c.rows) * c.cols);
    const int n = a.rows, k = a.cols, m = w.cols;
    // row blocks reuse each weight row while the block of c stays in cache;
    // the unrolled updates keep per-entry accumulation in k-ascending order
    // in both execution modes, so results are bit-identical
    constexpr int kRows = 8;
    const int n_blocks = (n + kRows - 1) / kRows;
#pragma omp parallel for schedule(static) if (mode == Exec::Parallel)
    for (int blk = 0; blk < n_blocks; ++blk) {
        const int r0 = blk * kRows;
        const int r1 = r0 + kRows < n ? r0 + kRows : n;
        for (int r = r0; r < r1; ++r) {
            double* crow = c.row(r);
            for (int j = 0; j < m; ++j) crow[j] = bias[j];
        }
        int kk = 0;
        for (; kk + 4 <= k; kk += 4) {
            const double* __restrict w0 = w.row(kk);
            const double* __restrict w1 = w.row(kk + 1);
            const double* __restrict w2 = w.row(kk + 2);
            const double* __restrict w3 = w.row(kk + 3);
            for (int r = r0; r < r1; ++r) {
                const double* arow = a.row(r);
                const double a0 = arow[kk], a1 = arow[kk + 1];
                const double a2 = arow[kk + 2], a3 = arow[kk + 3];
                double* __restrict crow = c.row(r);
                for (int j = 0; j < m; ++j)
                    crow[j] += a0 * w0[j] + a1 * w1[j] + a2 * w2[j] + a3 * w3[j];
            }
        }
        for (; kk < k; ++kk) {
            const double* __restrict wrow = w.row(kk);
            for (int r = r0; r < r1; ++r) {
                const double av = a(r, kk);
                double* __restrict crow = c.row(r);
                for (int j = 0; j < m; ++j) crow[j] += av * wrow[j];
            }
        }
    }
}

void add_gram(const Mat& a, const Mat& d, Mat& g, Exec mode) {
    if (a.rows != d.rows || g.rows != a.cols || g.cols != d.cols)
        throw DimensionMismatch("add_gram: shapes");
    const int n = a.rows, k = a.cols, m = d.cols;
    // blocked over output rows so each block of g stays cached while the
    // inputs are streamed once per block; per-entry accumulation order is
    // row-ascending in both execution modes
    constexpr int kBlock = 32;
    const int n_blocks = (k + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static) if (mode == Exec::Parallel)
    for (int blk = 0; blk < n_blocks; ++blk) {
        const int k0 = blk * kBlock;
        const int k1 = k0 + kBlock < k ? k0 + kBlock : k;
        int r = 0;
        for (; r + 4 <= n; r += 4) {
            const double* a0 = a.row(r);
            const double* a1 = a.row(r + 1);
            const double* a2 = a.row(r + 2);
            const double* a3 = a.row(r + 3);
            const double* __restrict d0 = d.row(r);
            const double* __restrict d1 = d.row(r + 1);
            const double* __restrict d2 = d.row(r + 2);
            const double* __restrict d3 = d.row(r + 3);
            for (int kk = k0; kk < k1; ++kk) {
                const double v0 = a0[kk], v1 = a1[kk], v2 = a2[kk], v3 = a3[kk];
                double* __restrict grow = g.row(kk);
                for (int j = 0; j < m; ++j)
                    grow[j] += v0 * d0[j] + v1 * d1[j] + v2 * d2[j] + v3 * d3[j];
            }
        }
        for (; r < n; ++r) {
            const double* arow = a.row(r);
            const double* __restrict drow = d.row(r);
            for (int kk = k0; kk < k1; ++kk) {
                const double av = arow[kk];
                double* __restrict grow = g.row(kk);
                for (int j = 0; j < m; ++j) grow[j] += av * drow[j];
            }
        }
    }
}

void back_rows(const Mat& d, const Mat& w, Mat& x, Exec mode) {
    if (d.cols != w.cols) throw DimensionMismatch("back_rows: shapes");
    x.rows = d.rows;
    x.cols = w.rows;
    x.a.resize(std::size_t(x.rows) * x.cols);
    const int n = d.rows, k = w.rows, m = w.cols;
    // d * w^T computed against a transposed copy so the inner loop is a
    // broadcast-and-accumulate over contiguous rows instead of a
    // latency-bound dot-product reduction
    Mat wt(m, k);
    for (int kk = 0; kk < k; ++kk)
        for (int j = 0; j < m; ++j) wt(j, kk) = w(kk, j);
    constexpr int kRows = 8;
    const int n_blocks = (n + kRows - 1) / kRows;
#pragma omp parallel for schedule(static) if (mode == Exec::Parallel)
    for (int blk = 0; blk < n_blocks; ++blk) {
        const int r0 = blk * kRows;
        const int r1 = r0 + kRows < n ? r0 + kRows : n;
        for (int r = r0; r < r1; ++r) {
            double* xrow = x.row(r);
            for (int kk = 0; kk < k; ++kk) xrow[kk] = 0.0;
        }
        int j = 0;
        for (; j + 4 <= m; j += 4) {
            const double* __restrict t0 = wt.row(j);
            const double* __restrict t1 = wt.row(j + 1);
            const double* __restrict t2 = wt.row(j + 2);
            const double* __restrict t3 = wt.row(j + 3);
            for (int r = r0; r < r1; ++r) {
                const double* drow = d.row(r);
                const double d0 = drow[j], d1 = drow[j + 1];
                const double d2 = drow[j + 2], d3 = drow[j + 3];
                double* __restrict xrow = x.row(r);
                for (int kk = 0; kk < k; ++kk)
                    xrow[kk] += d0 * t0[kk] + d1 * t1[kk] + d2 * t2[kk] + d3 * t3[kk];
            }
        }
        for (; j < m; ++j) {
            const double* __restrict trow = wt.row(j);
            for (int r = r0; r < r1; ++r) {
                const double dv = d(r, j);
                double* __restrict xrow = x.row(r);
                for (int kk = 0; kk < k; ++kk) xrow[kk] += dv * trow[kk];
            }
        }
    }
}

void add_colsum(const Mat& d, Vec& g, Exec mode) {
    if (int(g.size()) != d.cols) throw DimensionMismatch("add_colsum: shapes");
    const int n = d.rows, m = d.cols;
#pragma omp parallel for schedule(static) if (mode == Exec::Parallel)
    for (int j = 0; j < m; ++j) {
        double acc = 0.0;
        for (int r = 0; r < n; ++r) acc += d(r, j);
        g[j] += acc;
    }
}

}  // namespace icefloe::kernels
