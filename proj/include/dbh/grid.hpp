#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dbh {

using cplx = std::complex<double>;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SupportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Periodic grid on the torus [-L/2, L/2)^N, n points per axis, row-major
// storage (axis 0 slowest). Coordinates and frequencies are wrapped: index
// idx maps to coordinate idx*h for idx < n/2 and (idx-n)*h otherwise, and
// frequency index k maps to k/L with k wrapped to [-n/2, n/2).
struct Grid {
    int dim = 1;
    int n_axis = 0;
    double period = 0.0;

    double spacing() const { return period / n_axis; }
    std::size_t size() const {
        std::size_t s = 1;
        for (int d = 0; d < dim; ++d) s *= std::size_t(n_axis);
        return s;
    }
    double cell_volume() const {
        double v = 1.0;
        for (int d = 0; d < dim; ++d) v *= spacing();
        return v;
    }
    double box_volume() const {
        double v = 1.0;
        for (int d = 0; d < dim; ++d) v *= period;
        return v;
    }
    int wrap_index(long long i) const {
        long long n = n_axis;
        long long r = i % n;
        return int(r < 0 ? r + n : r);
    }
    double coord_of(int idx) const {
        return (idx < n_axis / 2 ? idx : idx - n_axis) * spacing();
    }
    double freq_of(int idx) const {
        return (idx < n_axis / 2 ? idx : idx - n_axis) / period;
    }
    void decode(std::size_t flat, int* idx) const {
        for (int d = dim - 1; d >= 0; --d) {
            idx[d] = int(flat % std::size_t(n_axis));
            flat /= std::size_t(n_axis);
        }
    }
    std::size_t encode(const int* idx) const {
        std::size_t f = 0;
        for (int d = 0; d < dim; ++d) f = f * std::size_t(n_axis) + std::size_t(idx[d]);
        return f;
    }
    std::array<double, 4> point(std::size_t flat) const {
        int idx[4] = {0, 0, 0, 0};
        decode(flat, idx);
        std::array<double, 4> x{0, 0, 0, 0};
        for (int d = 0; d < dim; ++d) x[d] = coord_of(idx[d]);
        return x;
    }
    std::array<double, 4> freq(std::size_t flat) const {
        int idx[4] = {0, 0, 0, 0};
        decode(flat, idx);
        std::array<double, 4> xi{0, 0, 0, 0};
        for (int d = 0; d < dim; ++d) xi[d] = freq_of(idx[d]);
        return xi;
    }
    // nearest grid index of a physical coordinate (wrapped)
    int index_of_coord(double x) const {
        double h = spacing();
        long long i = llround(x / h);
        return wrap_index(i);
    }
    bool operator==(const Grid& o) const {
        return dim == o.dim && n_axis == o.n_axis && period == o.period;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

Grid make_grid(int dim, int n_axis, double period);

// Axis-aligned box in wrapped coordinates, used as a declared support set.
struct SupportBox {
    std::array<double, 4> lo{0, 0, 0, 0};
    std::array<double, 4> hi{0, 0, 0, 0};

    bool contains(const std::array<double, 4>& x, int dim, double slack = 0.0) const {
        for (int d = 0; d < dim; ++d)
            if (x[d] < lo[d] - slack || x[d] > hi[d] + slack) return false;
        return true;
    }
    double width(int d) const { return hi[d] - lo[d]; }
};

// Complex field sampled on a Grid. Values and spectrum are two views of the
// same data; each is materialized lazily from the other and then cached.
// Immutable after construction.
//
// spectrum[k] = h^N * sum_x values[x] e^{-2 pi i <x,k>/n}  (~ continuous FT at k/L)
// values[x]   = L^-N * sum_k spectrum[k] e^{+2 pi i <x,k>/n}
class SampledField {
public:
    SampledField() = default;
    static SampledField from_values(const Grid& g, std::vector<cplx> vals);
    static SampledField from_spectrum(const Grid& g, std::vector<cplx> spec);
    static SampledField zeros(const Grid& g);

    const Grid& grid() const { return grid_; }
    bool empty() const { return data_ == nullptr; }
    const std::vector<cplx>& values() const;
    const std::vector<cplx>& spectrum() const;

    const std::optional<SupportBox>& support_tag() const { return support_; }
    // Attaches a declared support; throws SupportError if values leak outside
    // it by more than tol * max|values|.
    SampledField with_support(const SupportBox& box, double tol = 1e-12) const;
    SampledField without_support() const;

    // Set when an operation detected meaningful energy in the top frequency
    // octave (band pre-condition of spectral derivatives).
    bool band_warning() const { return band_warning_; }
    SampledField with_band_warning(bool w) const;

    double max_abs() const;

private:
    struct Payload {
        mutable std::mutex mu;
        mutable std::shared_ptr<const std::vector<cplx>> vals;
        mutable std::shared_ptr<const std::vector<cplx>> spec;
    };
    Grid grid_;
    std::shared_ptr<Payload> data_;
    std::optional<SupportBox> support_;
    bool band_warning_ = false;
};

// grid module operations
SampledField convolve(const SampledField& f, const SampledField& g);
SampledField fourier_multiplier(const SampledField& f,
                                const std::function<cplx(const std::array<double, 4>&)>& m);
// fast path: multiplier values precomputed on the lattice (flat order)
SampledField apply_multiplier(const SampledField& f, const std::vector<cplx>& m);
SampledField derivative(const SampledField& f, const std::array<int, 4>& gamma);
double lp_norm(const SampledField& f, double p);
double lp_norm_masked(const SampledField& f, double p, const std::vector<double>& mask);

// pointwise helpers used across modules
SampledField multiply_pointwise(const SampledField& f, const SampledField& g);
SampledField multiply_pointwise(const SampledField& f, const std::vector<double>& w);
SampledField add(const SampledField& f, const SampledField& g);
SampledField sub(const SampledField& f, const SampledField& g);
SampledField scale(const SampledField& f, cplx c);
double l2_norm(const SampledField& f);
double l2_dist(const SampledField& f, const SampledField& g);

// fraction of spectral energy in the top octave (|xi| > Nyquist/2)
double top_octave_energy_fraction(const SampledField& f);

// N-dim FFT of a raw buffer (unnormalized), sign=-1 forward
void fft_nd(std::vector<cplx>& data, const Grid& g, int sign);

} // namespace dbh
