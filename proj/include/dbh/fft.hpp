#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dbh::fft {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

// roots[j] = exp(-2*pi*i*j/n), j < n/2, shared by forward/backward.
inline const std::vector<cplx>& roots_for(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<std::vector<cplx>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) {
        auto tab = std::make_unique<std::vector<cplx>>(n / 2);
        for (std::size_t j = 0; j < n / 2; ++j) {
            double ang = -2.0 * std::numbers::pi * double(j) / double(n);
            (*tab)[j] = cplx(std::cos(ang), std::sin(ang));
        }
        slot = std::move(tab);
    }
    return *slot;
}

} // namespace detail

// In-place radix-2 DIT transform of a contiguous line.
// sign = -1: forward (e^{-2pi i jk/n}), sign = +1: backward, both unnormalized.
inline void transform_pow2(cplx* a, std::size_t n, int sign) {
    if (n <= 1) return;
    if (!is_pow2(n)) throw std::invalid_argument("fft: length must be a power of two");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const auto& roots = detail::roots_for(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx w = roots[j * step];
                if (sign > 0) w = std::conj(w);
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }
}

} // namespace dbh::fft
