#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference under
// kernels::scalar and, on x86-64, an AVX2 variant under kernels::avx2 that
// produces bit-identical results (same operation order, no FMA). The
// unqualified entry points dispatch once at runtime on CPU support; setting
// MINTRACE_SIMD=scalar in the environment forces the reference path.

#include <cstdint>
#include <span>
#include <string_view>

namespace mintrace::kernels {

enum class Isa { Scalar, Avx2 };

[[nodiscard]] bool avx2_available() noexcept;
[[nodiscard]] Isa active_isa() noexcept;
[[nodiscard]] std::string_view isa_name(Isa isa) noexcept;

/// Cholesky factor of sigma (row-major p x p) with rows/columns permuted by
/// `order`. Writes the strictly-lower entries of L to `lower` (row-major p x p)
/// and the squared diagonal (the conditional variances) to `pivots`. Returns
/// false as soon as a pivot is not above `floor`.
bool permuted_cholesky(std::span<const double> sigma, int p, std::span<const int> order, double floor,
                       std::span<double> lower, std::span<double> pivots) noexcept;

/// For each of the `traces.size()` orderings packed in `orders` (p bytes each),
/// the sum of the permuted Cholesky pivots; NaN when a pivot is not above `floor`.
void ordering_traces(std::span<const double> sigma, int p, std::span<const std::uint8_t> orders, double floor,
                     std::span<double> traces);

/// out = X^T X for column-major n x p data; out is row-major p x p.
void gram(std::span<const double> x, int n, int p, std::span<double> out);

namespace scalar {
void ordering_traces(std::span<const double> sigma, int p, std::span<const std::uint8_t> orders, double floor,
                     std::span<double> traces);
void gram(std::span<const double> x, int n, int p, std::span<double> out);
double dot(const double* a, const double* b, int n) noexcept;
}  // namespace scalar

#if defined(MINTRACE_HAVE_AVX2)
namespace avx2 {
void ordering_traces(std::span<const double> sigma, int p, std::span<const std::uint8_t> orders, double floor,
                     std::span<double> traces);
void gram(std::span<const double> x, int n, int p, std::span<double> out);
}  // namespace avx2
#endif

}  // namespace mintrace::kernels
