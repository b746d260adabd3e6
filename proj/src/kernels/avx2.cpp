#include <immintrin.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "mintrace/kernels.hpp"

namespace mintrace::kernels::avx2 {

namespace {
constexpr std::size_t kLanes = 4;
}

void ordering_traces(std::span<const double> sigma, int p, std::span<const std::uint8_t> orders, double floor,
                     std::span<double> traces) {
    const std::size_t count = traces.size();
    const auto pp = static_cast<std::size_t>(p) * p;
    // a[k*p+l] holds four orderings' permuted entries side by side; reused as L.
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wignored-attributes"
    std::vector<__m256d> a(pp);
    std::vector<__m256d> diag(p);
#pragma GCC diagnostic pop
    const __m256d vfloor = _mm256_set1_pd(floor);

    for (std::size_t base = 0; base < count; base += kLanes) {
        const std::uint8_t* lane_order[kLanes];
        for (std::size_t lane = 0; lane < kLanes; ++lane) {
            const std::size_t b = base + lane < count ? base + lane : count - 1;
            lane_order[lane] = orders.data() + b * p;
        }
        for (int k = 0; k < p; ++k) {
            for (int l = 0; l <= k; ++l) {
                alignas(32) double v[kLanes];
                for (std::size_t lane = 0; lane < kLanes; ++lane) {
                    v[lane] = sigma[static_cast<std::size_t>(lane_order[lane][k]) * p + lane_order[lane][l]];
                }
                a[k * p + l] = _mm256_load_pd(v);
            }
        }

        __m256d trace = _mm256_setzero_pd();
        __m256d bad = _mm256_setzero_pd();
        for (int k = 0; k < p; ++k) {
            __m256d* lk = a.data() + static_cast<std::ptrdiff_t>(k) * p;
            for (int l = 0; l < k; ++l) {
                const __m256d* ll = a.data() + static_cast<std::ptrdiff_t>(l) * p;
                __m256d s = lk[l];
                for (int m = 0; m < l; ++m) s = _mm256_sub_pd(s, _mm256_mul_pd(lk[m], ll[m]));
                lk[l] = _mm256_div_pd(s, diag[l]);
            }
            __m256d d = lk[k];
            for (int m = 0; m < k; ++m) d = _mm256_sub_pd(d, _mm256_mul_pd(lk[m], lk[m]));
            bad = _mm256_or_pd(bad, _mm256_cmp_pd(d, vfloor, _CMP_NGT_UQ));
            trace = _mm256_add_pd(trace, d);
            diag[k] = _mm256_sqrt_pd(d);
        }

        alignas(32) double t[kLanes];
        alignas(32) double mask[kLanes];
        _mm256_store_pd(t, trace);
        _mm256_store_pd(mask, bad);
        for (std::size_t lane = 0; lane < kLanes && base + lane < count; ++lane) {
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(double));
            std::memcpy(&bits, &mask[lane], sizeof(bits));
            traces[base + lane] = bits ? std::numeric_limits<double>::quiet_NaN() : t[lane];
        }
    }
}

namespace {

double dot(const double* x, const double* y, int n) noexcept {
    __m256d acc = _mm256_setzero_pd();
    int r = 0;
    for (; r + 4 <= n; r += 4) {
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + r), _mm256_loadu_pd(y + r)));
    }
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    double total = (s[0] + s[1]) + (s[2] + s[3]);
    for (; r < n; ++r) total = total + x[r] * y[r];
    return total;
}

}  // namespace

void gram(std::span<const double> x, int n, int p, std::span<double> out) {
    for (int a = 0; a < p; ++a) {
        const double* xa = x.data() + static_cast<std::ptrdiff_t>(a) * n;
        for (int b = a; b < p; ++b) {
            const double v = dot(xa, x.data() + static_cast<std::ptrdiff_t>(b) * n, n);
            out[a * p + b] = v;
            out[b * p + a] = v;
        }
    }
}

}  // namespace mintrace::kernels::avx2
