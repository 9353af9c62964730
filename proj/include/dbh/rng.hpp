#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace dbh {

// Counter-based generator: every draw is a pure function of (seed, stream,
// counter), so parallel sample batches are reproducible regardless of
// scheduling. splitmix64 finalizer as the mixing function.
struct CounterRng {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t bits(std::uint64_t counter) const {
        return mix(mix(seed ^ 0x708af02c36107cd1ULL) + mix(stream) + counter * 0xd1342543de82ef95ULL);
    }

    // uniform in [0,1)
    double u01(std::uint64_t counter) const {
        return double(bits(counter) >> 11) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; one value per counter
    double gauss(std::uint64_t counter) const {
        double u1 = u01(counter * 2 + 1);
        double u2 = u01(counter * 2 + 2);
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
};

// Stateful convenience wrapper for sequential draws.
class SeqRng {
public:
    explicit SeqRng(std::uint64_t seed, std::uint64_t stream = 0) : rng_{seed, stream} {}
    double u01() { return rng_.u01(ctr_++); }
    double gauss() { return rng_.gauss(ctr_++); }
    double uniform(double a, double b) { return a + (b - a) * u01(); }
    std::uint64_t bits() { return rng_.bits(ctr_++); }

private:
    CounterRng rng_;
    std::uint64_t ctr_ = 0;
};

} // namespace dbh
