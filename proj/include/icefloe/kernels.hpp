#pragma once

#include "icefloe/linalg.hpp"

namespace icefloe::kernels {

// Every kernel comes in a serial and an OpenMP flavour selected by Exec.
// The two paths perform identical arithmetic in identical order (threads
// only split independent output rows), so results are bit-equal and a
// seeded run reproduces exactly regardless of thread count. The benchmark
// tool compares their throughput.
enum class Exec { Serial, Parallel };

// c = a * w + bias (bias broadcast over rows); a: n x k, w: k x m.
void affine(const Mat& a, const Mat& w, const Vec& bias, Mat& c, Exec mode);

// g += a^T * d; a: n x k, d: n x m, g: k x m. The weight-gradient product.
void add_gram(const Mat& a, const Mat& d, Mat& g, Exec mode);

// x = d * w^T; d: n x m, w: k x m, x: n x k. The input-gradient product.
void back_rows(const Mat& d, const Mat& w, Mat& x, Exec mode);

// g += column sums of d.
void add_colsum(const Mat& d, Vec& g, Exec mode);

}  // namespace icefloe::kernels
