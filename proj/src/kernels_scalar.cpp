// Copyright 2026 the argnet authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "argnet/kernels.hpp"

namespace argnet::kernels {

namespace {

double sum_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double sum_squares_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void gather_multiply_scalar(const double* a, const std::uint32_t* ia, const double* b, const std::uint32_t* ib,
                            double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[ia[i]] * b[ib[i]];
}

void fold_pairs_scalar(const double* in, double* out, std::size_t blocks, std::size_t stride) {
    for (std::size_t b = 0; b < blocks; ++b) {
        const double* lo = in + 2 * b * stride;
        const double* hi = lo + stride;
        double* dst = out + b * stride;
        for (std::size_t j = 0; j < stride; ++j) dst[j] = lo[j] + hi[j];
    }
}

void scale_scalar(double* x, std::size_t n, double factor) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= factor;
}

}  // namespace

const KernelSet& scalar() {
    static const KernelSet set{
        "scalar", sum_scalar, sum_squares_scalar, dot_scalar, gather_multiply_scalar, fold_pairs_scalar, scale_scalar,
    };
    return set;
}

}  // namespace argnet::kernels
