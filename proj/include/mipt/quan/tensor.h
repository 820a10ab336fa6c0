// Copyright 2026 The mipt-quan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MIPT_QUAN_TENSOR_H
#define MIPT_QUAN_TENSOR_H

#include <cstddef>
#include <string>
#include <vector>

namespace mipt::quan {

/// Row-major matrix of doubles. Vectors are 1 x n, scalars 1 x 1.
struct Tensor {
    std::string name;
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> values;

    Tensor() = default;
    Tensor(std::string name, size_t rows, size_t cols)
        : name(std::move(name)), rows(rows), cols(cols), values(rows * cols, 0.0) {}

    size_t size() const { return values.size(); }
    double &operator()(size_t r, size_t c) { return values[r * cols + c]; }
    double operator()(size_t r, size_t c) const { return values[r * cols + c]; }
    double *row(size_t r) { return values.data() + r * cols; }
    const double *row(size_t r) const { return values.data() + r * cols; }
    void zero() { std::fill(values.begin(), values.end(), 0.0); }
};

/// Plain matrix without a name, used for activations.
struct Mat {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(size_t rows, size_t cols) : rows(rows), cols(cols), v(rows * cols, 0.0) {}

    double &operator()(size_t r, size_t c) { return v[r * cols + c]; }
    double operator()(size_t r, size_t c) const { return v[r * cols + c]; }
    double *row(size_t r) { return v.data() + r * cols; }
    const double *row(size_t r) const { return v.data() + r * cols; }
};

/// C = A B^T with A (n x k), B (m x k).
Mat matmul_nt(const Mat &a, const double *b, size_t m, size_t k);
/// C = A B with A (n x k), B (k x m).
Mat matmul_nn(const Mat &a, const double *b, size_t k, size_t m);
/// C += A^T B with A (n x r), B (n x c); C is r x c.
void add_matmul_tn(double *c, const Mat &a, const Mat &b);

/// Row-wise layer normalization with gain and bias.
struct LayerNormCache {
    Mat xhat;
    std::vector<double> inv_std;
};

constexpr double kLayerNormEps = 1e-5;

Mat layer_norm(const Mat &x, const double *gain, const double *bias, LayerNormCache &cache);
/// Returns dL/dx and accumulates gain and bias gradients.
Mat layer_norm_backward(const Mat &dy, const double *gain, const LayerNormCache &cache, double *dgain,
                        double *dbias);

/// In-place row-wise softmax.
void softmax_rows(Mat &a);
/// dA from dS for S = softmax_rows(A).
Mat softmax_rows_backward(const Mat &s, const Mat &ds);

double sigmoid(double x);

}  // namespace mipt::quan

#endif
