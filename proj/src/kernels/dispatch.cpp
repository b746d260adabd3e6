#include <cstdlib>
#include <string_view>

#include "mintrace/kernels.hpp"

namespace mintrace::kernels {

bool avx2_available() noexcept {
#if defined(MINTRACE_HAVE_AVX2)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() noexcept {
    static const Isa isa = [] {
        const char* forced = std::getenv("MINTRACE_SIMD");
        if (forced != nullptr && std::string_view(forced) == "scalar") return Isa::Scalar;
        return avx2_available() ? Isa::Avx2 : Isa::Scalar;
    }();
    return isa;
}

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void ordering_traces(std::span<const double> sigma, int p, std::span<const std::uint8_t> orders, double floor,
                     std::span<double> traces) {
#if defined(MINTRACE_HAVE_AVX2)
    if (active_isa() == Isa::Avx2) return avx2::ordering_traces(sigma, p, orders, floor, traces);
#endif
    scalar::ordering_traces(sigma, p, orders, floor, traces);
}

void gram(std::span<const double> x, int n, int p, std::span<double> out) {
#if defined(MINTRACE_HAVE_AVX2)
    if (active_isa() == Isa::Avx2) return avx2::gram(x, n, p, out);
#endif
    scalar::gram(x, n, p, out);
}

}  // namespace mintrace::kernels
