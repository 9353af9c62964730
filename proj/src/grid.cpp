#include "dbh/grid.hpp"

#include <algorithm>
#include <cmath>

#include "dbh/fft.hpp"
#include "dbh/parallel.hpp"

namespace dbh {

Grid make_grid(int dim, int n_axis, double period) {
    if (dim != 1 && dim != 2 && dim != 4)
        throw ConfigError("make_grid: dimension must be 1, 2 or 4");
    if (n_axis <= 0 || !fft::is_pow2(std::size_t(n_axis)))
        throw ConfigError("make_grid: points per axis must be a power of two");
    if (!(period > 0.0)) throw ConfigError("make_grid: period must be positive");
    return Grid{dim, n_axis, period};
}

void fft_nd(std::vector<cplx>& data, const Grid& g, int sign) {
    const std::size_t n = std::size_t(g.n_axis);
    const std::size_t total = g.size();
    if (data.size() != total) throw NumericError("fft_nd: size mismatch");
    // last axis is contiguous
    std::size_t lines = total / n;
    parallel_chunks(lines, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t li = b; li < e; ++li) fft::transform_pow2(data.data() + li * n, n, sign);
    });
    // remaining axes via strided gather
    std::size_t stride = n;
    for (int axis = g.dim - 2; axis >= 0; --axis) {
        std::size_t block = stride * n; // elements spanned by one transform set
        std::size_t nblocks = total / block;
        parallel_chunks(nblocks * stride, [&](std::size_t, std::size_t bb, std::size_t ee) {
            std::vector<cplx> line(n);
            for (std::size_t t = bb; t < ee; ++t) {
                std::size_t blk = t / stride, off = t % stride;
                cplx* base = data.data() + blk * block + off;
                for (std::size_t j = 0; j < n; ++j) line[j] = base[j * stride];
                fft::transform_pow2(line.data(), n, sign);
                for (std::size_t j = 0; j < n; ++j) base[j * stride] = line[j];
            }
        });
        stride *= n;
    }
}

SampledField SampledField::from_values(const Grid& g, std::vector<cplx> vals) {
    if (vals.size() != g.size()) throw NumericError("from_values: size mismatch");
    SampledField f;
    f.grid_ = g;
    f.data_ = std::make_shared<Payload>();
    f.data_->vals = std::make_shared<const std::vector<cplx>>(std::move(vals));
    return f;
}

SampledField SampledField::from_spectrum(const Grid& g, std::vector<cplx> spec) {
    if (spec.size() != g.size()) throw NumericError("from_spectrum: size mismatch");
    SampledField f;
    f.grid_ = g;
    f.data_ = std::make_shared<Payload>();
    f.data_->spec = std::make_shared<const std::vector<cplx>>(std::move(spec));
    return f;
}

SampledField SampledField::zeros(const Grid& g) {
    return from_values(g, std::vector<cplx>(g.size(), cplx(0, 0)));
}

const std::vector<cplx>& SampledField::values() const {
    if (!data_) throw NumericError("empty field");
    std::lock_guard<std::mutex> lock(data_->mu);
    if (!data_->vals) {
        std::vector<cplx> v(*data_->spec);
        fft_nd(v, grid_, +1);
        double scale = 1.0 / grid_.box_volume();
        for (auto& z : v) z *= scale;
        data_->vals = std::make_shared<const std::vector<cplx>>(std::move(v));
    }
    return *data_->vals;
}

const std::vector<cplx>& SampledField::spectrum() const {
    if (!data_) throw NumericError("empty field");
    std::lock_guard<std::mutex> lock(data_->mu);
    if (!data_->spec) {
        std::vector<cplx> s(*data_->vals);
        fft_nd(s, grid_, -1);
        double scale = grid_.cell_volume();
        for (auto& z : s) z *= scale;
        data_->spec = std::make_shared<const std::vector<cplx>>(std::move(s));
    }
    return *data_->spec;
}

double SampledField::max_abs() const {
    const auto& v = values();
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

SampledField SampledField::with_support(const SupportBox& box, double tol) const {
    const auto& v = values();
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    double leak = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!box.contains(grid_.point(i), grid_.dim, 0.5 * grid_.spacing()))
            leak = std::max(leak, std::abs(v[i]));
    }
    if (m > 0.0 && leak > tol * m)
        throw SupportError("declared support violated: leakage " + std::to_string(leak / m));
    SampledField f(*this);
    f.support_ = box;
    return f;
}

SampledField SampledField::without_support() const {
    SampledField f(*this);
    f.support_.reset();
    return f;
}

SampledField SampledField::with_band_warning(bool w) const {
    SampledField f(*this);
    f.band_warning_ = w;
    return f;
}

SampledField convolve(const SampledField& f, const SampledField& g) {
    if (f.grid() != g.grid()) throw ConfigError("convolve: grid mismatch");
    const auto& a = f.spectrum();
    const auto& b = g.spectrum();
    std::vector<cplx> s(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] * b[i];
    SampledField out = SampledField::from_spectrum(f.grid(), std::move(s));
    if (f.support_tag() && g.support_tag()) {
        SupportBox box;
        bool ok = true;
        for (int d = 0; d < f.grid().dim; ++d) {
            box.lo[d] = f.support_tag()->lo[d] + g.support_tag()->lo[d];
            box.hi[d] = f.support_tag()->hi[d] + g.support_tag()->hi[d];
            if (box.width(d) >= f.grid().period ||
                box.lo[d] < -0.5 * f.grid().period || box.hi[d] >= 0.5 * f.grid().period)
                ok = false;
        }
        if (!ok)
            throw SupportError("convolve: Minkowski sum of declared supports wraps the period");
        out = out.with_support(box, 1e-11);
    }
    return out;
}

SampledField fourier_multiplier(const SampledField& f,
                                const std::function<cplx(const std::array<double, 4>&)>& m) {
    const auto& s = f.spectrum();
    std::vector<cplx> out(s.size());
    const Grid& g = f.grid();
    for (std::size_t i = 0; i < s.size(); ++i) {
        cplx mi = m(g.freq(i));
        if (!std::isfinite(mi.real()) || !std::isfinite(mi.imag()))
            throw NumericError("fourier_multiplier: non-finite symbol on the lattice");
        out[i] = mi * s[i];
    }
    return SampledField::from_spectrum(g, std::move(out));
}

SampledField apply_multiplier(const SampledField& f, const std::vector<cplx>& m) {
    const auto& s = f.spectrum();
    if (m.size() != s.size()) throw NumericError("apply_multiplier: size mismatch");
    std::vector<cplx> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = m[i] * s[i];
    return SampledField::from_spectrum(f.grid(), std::move(out));
}

double top_octave_energy_fraction(const SampledField& f) {
    const auto& s = f.spectrum();
    const Grid& g = f.grid();
    double nyq = 0.5 * g.n_axis / g.period;
    double top = 0.0, tot = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double e = std::norm(s[i]);
        tot += e;
        auto xi = g.freq(i);
        double m = 0.0;
        for (int d = 0; d < g.dim; ++d) m = std::max(m, std::abs(xi[d]));
        if (m > 0.5 * nyq) top += e;
    }
    return tot > 0 ? top / tot : 0.0;
}

SampledField derivative(const SampledField& f, const std::array<int, 4>& gamma) {
    const Grid& g = f.grid();
    bool warn = top_octave_energy_fraction(f) > 1e-6;
    const cplx tpi(0.0, 2.0 * std::numbers::pi);
    SampledField out = fourier_multiplier(f, [&](const std::array<double, 4>& xi) {
        cplx m(1.0, 0.0);
        for (int d = 0; d < g.dim; ++d)
            for (int k = 0; k < gamma[d]; ++k) m *= tpi * xi[d];
        return m;
    });
    return out.with_band_warning(warn || f.band_warning());
}

double lp_norm(const SampledField& f, double p) {
    if (p < 1.0) throw ConfigError("lp_norm: p must satisfy 1 <= p < inf");
    const auto& v = f.values();
    double hv = f.grid().cell_volume();
    double acc = parallel_sum(v.size(), 0.0, [&](std::size_t i) { return std::pow(std::abs(v[i]), p); });
    return std::pow(hv * acc, 1.0 / p);
}

double lp_norm_masked(const SampledField& f, double p, const std::vector<double>& mask) {
    if (p < 1.0) throw ConfigError("lp_norm: p must satisfy 1 <= p < inf");
    const auto& v = f.values();
    if (mask.size() != v.size()) throw NumericError("lp_norm_masked: mask size mismatch");
    double hv = f.grid().cell_volume();
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += mask[i] * std::pow(std::abs(v[i]), p);
    return std::pow(hv * acc, 1.0 / p);
}

SampledField multiply_pointwise(const SampledField& f, const SampledField& g) {
    if (f.grid() != g.grid()) throw ConfigError("multiply_pointwise: grid mismatch");
    const auto& a = f.values();
    const auto& b = g.values();
    std::vector<cplx> v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i] * b[i];
    return SampledField::from_values(f.grid(), std::move(v));
}

SampledField multiply_pointwise(const SampledField& f, const std::vector<double>& w) {
    const auto& a = f.values();
    if (w.size() != a.size()) throw NumericError("multiply_pointwise: weight size mismatch");
    std::vector<cplx> v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i] * w[i];
    return SampledField::from_values(f.grid(), std::move(v));
}

SampledField add(const SampledField& f, const SampledField& g) {
    if (f.grid() != g.grid()) throw ConfigError("add: grid mismatch");
    const auto& a = f.values();
    const auto& b = g.values();
    std::vector<cplx> v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i] + b[i];
    return SampledField::from_values(f.grid(), std::move(v));
}

SampledField sub(const SampledField& f, const SampledField& g) {
    if (f.grid() != g.grid()) throw ConfigError("sub: grid mismatch");
    const auto& a = f.values();
    const auto& b = g.values();
    std::vector<cplx> v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i] - b[i];
    return SampledField::from_values(f.grid(), std::move(v));
}

SampledField scale(const SampledField& f, cplx c) {
    const auto& a = f.values();
    std::vector<cplx> v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = c * a[i];
    return SampledField::from_values(f.grid(), std::move(v));
}

double l2_norm(const SampledField& f) { return lp_norm(f, 2.0); }

double l2_dist(const SampledField& f, const SampledField& g) {
    return l2_norm(sub(f, g));
}

} // namespace dbh
