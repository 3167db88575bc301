#include "sclreg/kernels.hpp"

#include "sclreg/errors.hpp"

#include <cstdlib>
#include <string>

namespace sclreg::kern {

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const Ops& active_ops() {
    static const Ops& chosen = []() -> const Ops& {
        if (const char* isa = std::getenv("SCLREG_ISA")) {
            const std::string want(isa);
            if (want == "scalar")
                return scalar_ops();
            if (want == "avx2") {
                if (!avx2_supported())
                    throw ArgumentError("SCLREG_ISA=avx2 requested but CPU lacks AVX2");
                return avx2_ops();
            }
            throw ArgumentError("unknown SCLREG_ISA value '" + want +
                                "' (expected 'scalar' or 'avx2')");
        }
        return avx2_supported() ? avx2_ops() : scalar_ops();
    }();
    return chosen;
}

} // namespace sclreg::kern
