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

#pragma once

// Data-parallel inner loops of factor arithmetic. Every kernel has a scalar
// reference version; an AVX2 build is picked at runtime when the CPU has it.
// Set ARGNET_KERNELS=scalar in the environment to force the reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace argnet::kernels {

struct KernelSet {
    std::string_view name;

    double (*sum)(const double* x, std::size_t n);
    double (*sum_squares)(const double* x, std::size_t n);
    double (*dot)(const double* x, const double* y, std::size_t n);

    // out[i] = a[ia[i]] * b[ib[i]]
    void (*gather_multiply)(const double* a, const std::uint32_t* ia, const double* b, const std::uint32_t* ib,
                            double* out, std::size_t n);

    // Sums out one variable. `in` holds `blocks` blocks of 2*stride values, the
    // first stride for value false, the second for true:
    // out[b*stride + j] = in[2*b*stride + j] + in[2*b*stride + stride + j]
    void (*fold_pairs)(const double* in, double* out, std::size_t blocks, std::size_t stride);

    void (*scale)(double* x, std::size_t n, double factor);
};

const KernelSet& scalar();

// Null when the AVX2 variant was not built or the CPU lacks AVX2/FMA.
const KernelSet* avx2();

// The set used by the inference engine; chosen once per process.
const KernelSet& active();

}  // namespace argnet::kernels
