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

#include <cstdlib>
#include <string_view>

#include "argnet/kernels.hpp"

namespace argnet::kernels {

#if defined(ARGNET_HAVE_AVX2)
const KernelSet& avx2_set();
#endif

const KernelSet* avx2() {
#if defined(ARGNET_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &avx2_set() : nullptr;
#else
    return nullptr;
#endif
}

const KernelSet& active() {
    static const KernelSet& chosen = [&]() -> const KernelSet& {
        const char* forced = std::getenv("ARGNET_KERNELS");
        if (forced && std::string_view(forced) == "scalar") return scalar();
        if (const KernelSet* fast = avx2()) return *fast;
        return scalar();
    }();
    return chosen;
}

}  // namespace argnet::kernels
