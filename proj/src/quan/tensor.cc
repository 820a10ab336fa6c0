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

#include "mipt/quan/tensor.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace mipt::quan {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const RowMat>;
using Map = Eigen::Map<RowMat>;

}  // namespace

Mat matmul_nt(const Mat &a, const double *b, size_t m, size_t k) {
    Mat c(a.rows, m);
    Map(c.v.data(), a.rows, m).noalias() = MapC(a.v.data(), a.rows, k) * MapC(b, m, k).transpose();
    return c;
}

Mat matmul_nn(const Mat &a, const double *b, size_t k, size_t m) {
    Mat c(a.rows, m);
    Map(c.v.data(), a.rows, m).noalias() = MapC(a.v.data(), a.rows, k) * MapC(b, k, m);
    return c;
}

void add_matmul_tn(double *c, const Mat &a, const Mat &b) {
    Map(c, a.cols, b.cols).noalias() += MapC(a.v.data(), a.rows, a.cols).transpose() * MapC(b.v.data(), b.rows, b.cols);
}

Mat layer_norm(const Mat &x, const double *gain, const double *bias, LayerNormCache &cache) {
    Mat y(x.rows, x.cols);
    cache.xhat = Mat(x.rows, x.cols);
    cache.inv_std.assign(x.rows, 0.0);
    double n = static_cast<double>(x.cols);
    for (size_t r = 0; r < x.rows; r++) {
        const double *xr = x.row(r);
        double mu = 0;
        for (size_t c = 0; c < x.cols; c++) mu += xr[c];
        mu /= n;
        double var = 0;
        for (size_t c = 0; c < x.cols; c++) var += (xr[c] - mu) * (xr[c] - mu);
        var /= n;
        double inv = 1.0 / std::sqrt(var + kLayerNormEps);
        cache.inv_std[r] = inv;
        double *hr = cache.xhat.row(r);
        double *yr = y.row(r);
        for (size_t c = 0; c < x.cols; c++) {
            hr[c] = (xr[c] - mu) * inv;
            yr[c] = gain[c] * hr[c] + bias[c];
        }
    }
    return y;
}

Mat layer_norm_backward(const Mat &dy, const double *gain, const LayerNormCache &cache, double *dgain,
                        double *dbias) {
    Mat dx(dy.rows, dy.cols);
    double n = static_cast<double>(dy.cols);
    for (size_t r = 0; r < dy.rows; r++) {
        const double *dyr = dy.row(r);
        const double *hr = cache.xhat.row(r);
        double mean_d = 0, mean_dh = 0;
        for (size_t c = 0; c < dy.cols; c++) {
            double d = dyr[c] * gain[c];
            mean_d += d;
            mean_dh += d * hr[c];
            dgain[c] += dyr[c] * hr[c];
            dbias[c] += dyr[c];
        }
        mean_d /= n;
        mean_dh /= n;
        double *dxr = dx.row(r);
        for (size_t c = 0; c < dy.cols; c++) {
            double d = dyr[c] * gain[c];
            dxr[c] = cache.inv_std[r] * (d - mean_d - hr[c] * mean_dh);
        }
    }
    return dx;
}

void softmax_rows(Mat &a) {
    for (size_t r = 0; r < a.rows; r++) {
        double *ar = a.row(r);
        double mx = *std::max_element(ar, ar + a.cols);
        double s = 0;
        for (size_t c = 0; c < a.cols; c++) {
            ar[c] = std::exp(ar[c] - mx);
            s += ar[c];
        }
        for (size_t c = 0; c < a.cols; c++) {
            ar[c] /= s;
        }
    }
}

Mat softmax_rows_backward(const Mat &s, const Mat &ds) {
    Mat da(s.rows, s.cols);
    for (size_t r = 0; r < s.rows; r++) {
        const double *sr = s.row(r);
        const double *dr = ds.row(r);
        double dot = 0;
        for (size_t c = 0; c < s.cols; c++) dot += sr[c] * dr[c];
        double *out = da.row(r);
        for (size_t c = 0; c < s.cols; c++) out[c] = sr[c] * (dr[c] - dot);
    }
    return da;
}

double sigmoid(double x) {
    if (x >= 0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace mipt::quan
