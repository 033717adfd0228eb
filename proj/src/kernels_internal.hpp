#pragma once

#include "lora/kernels.hpp"

namespace lora::kernels::detail {

extern const KernelTable kScalarTable;
#if defined(LORA_WITH_AVX2)
extern const KernelTable kAvx2Table;
#endif

}  // namespace lora::kernels::detail
