#include <cmath>
#include <limits>
#include <vector>

#include "mintrace/kernels.hpp"

namespace mintrace::kernels {

bool permuted_cholesky(std::span<const double> sigma, int p, std::span<const int> order, double floor,
                       std::span<double> lower, std::span<double> pivots) noexcept {
    // Row-oriented (Crout) scheme; the AVX2 trace kernel mirrors it lane-wise.
    std::vector<double> diag(p);
    for (int k = 0; k < p; ++k) {
        const double* srow = sigma.data() + static_cast<std::ptrdiff_t>(order[k]) * p;
        double* lk = lower.data() + static_cast<std::ptrdiff_t>(k) * p;
        for (int l = 0; l < k; ++l) {
            const double* ll = lower.data() + static_cast<std::ptrdiff_t>(l) * p;
            double s = srow[order[l]];
            for (int m = 0; m < l; ++m) s = s - lk[m] * ll[m];
            lk[l] = s / diag[l];
        }
        double d = srow[order[k]];
        for (int m = 0; m < k; ++m) d = d - lk[m] * lk[m];
        pivots[k] = d;
        if (!(d > floor)) return false;
        diag[k] = std::sqrt(d);
    }
    return true;
}

namespace scalar {

void ordering_traces(std::span<const double> sigma, int p, std::span<const std::uint8_t> orders, double floor,
                     std::span<double> traces) {
    std::vector<int> order(p);
    std::vector<double> lower(static_cast<std::size_t>(p) * p);
    std::vector<double> pivots(p);
    for (std::size_t b = 0; b < traces.size(); ++b) {
        for (int k = 0; k < p; ++k) order[k] = orders[b * p + k];
        if (!permuted_cholesky(sigma, p, order, floor, lower, pivots)) {
            traces[b] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        double t = 0.0;
        for (int k = 0; k < p; ++k) t = t + pivots[k];
        traces[b] = t;
    }
}

double dot(const double* a, const double* b, int n) noexcept {
    // Four interleaved partial sums combined pairwise: the reduction tree the
    // AVX2 kernel uses, so both produce identical bits.
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    int r = 0;
    for (; r + 4 <= n; r += 4) {
        s0 = s0 + a[r] * b[r];
        s1 = s1 + a[r + 1] * b[r + 1];
        s2 = s2 + a[r + 2] * b[r + 2];
        s3 = s3 + a[r + 3] * b[r + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
    for (; r < n; ++r) s = s + a[r] * b[r];
    return s;
}

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

}  // namespace scalar
}  // namespace mintrace::kernels
