#include "dbh/sobolev.hpp"

#include <cmath>
#include <numbers>

#include "dbh/parallel.hpp"

namespace dbh {

namespace {

double smooth_step(double t, int variant) {
    // 1 for t <= 0, 0 for t >= 1, C-infinity in between
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    auto q = [variant](double u) {
        return variant == 0 ? std::exp(-1.0 / u) : std::exp(-1.0 / (u * u));
    };
    return q(1.0 - t) / (q(1.0 - t) + q(t));
}

double lp_profile(double r, double knee, int variant) {
    return smooth_step(r / knee - 1.0, variant);
}

} // namespace

LPFamily build_lp_family(const Grid& g, double knee, int variant) {
    LPFamily fam;
    fam.grid = g;
    fam.knee = knee;
    fam.variant = variant;
    double ximax = 0.0;
    for (int d = 0; d < g.dim; ++d)
        ximax += std::pow(0.5 * g.n_axis / g.period, 2);
    ximax = std::sqrt(ximax);
    fam.j_max = std::max(1, int(std::ceil(std::log2(ximax / knee))) + 1);
    fam.symbols_.resize(std::size_t(fam.j_max) + 1);
    for (int j = 0; j <= fam.j_max; ++j) fam.symbols_[std::size_t(j)].resize(g.size());
    parallel_chunks(g.size(), [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            auto xi = g.freq(i);
            double r = 0.0;
            for (int d = 0; d < g.dim; ++d) r += xi[std::size_t(d)] * xi[std::size_t(d)];
            r = std::sqrt(r);
            double prev = lp_profile(r, knee, variant); // lambda_0^
            fam.symbols_[0][i] = prev;
            for (int j = 1; j <= fam.j_max; ++j) {
                double cur = lp_profile(std::ldexp(r, -j), knee, variant);
                fam.symbols_[std::size_t(j)][i] = cur - prev;
                prev = cur;
            }
        }
    });
    return fam;
}

SampledField LPFamily::apply(const SampledField& f, int j) const {
    return apply_multiplier(f, symbols_[std::size_t(j)]);
}

SampledField bessel_potential(const SampledField& f, double s) {
    if (s == 0.0) return f;
    const Grid& g = f.grid();
    const auto& spec = f.spectrum();
    std::vector<cplx> out(spec.size());
    const double fourpi2 = 4.0 * std::numbers::pi * std::numbers::pi;
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto xi = g.freq(i);
        double q = 1.0;
        for (int d = 0; d < g.dim; ++d) q += fourpi2 * xi[std::size_t(d)] * xi[std::size_t(d)];
        out[i] = std::pow(q, 0.5 * s) * spec[i];
    }
    return SampledField::from_spectrum(g, std::move(out));
}

double sobolev_norm(const SampledField& f, SobolevIndex idx) {
    if (!(idx.p > 1.0) || !std::isfinite(idx.p))
        throw ConfigError("sobolev_norm: p must lie in (1, inf)");
    return lp_norm(bessel_potential(f, idx.s), idx.p);
}

double lp_norm_sq(const SampledField& f, SobolevIndex idx, const LPFamily& fam) {
    if (!(idx.p > 1.0) || !std::isfinite(idx.p))
        throw ConfigError("lp_norm_sq: p must lie in (1, inf)");
    const Grid& g = f.grid();
    std::vector<double> sq(g.size(), 0.0);
    for (int j = 0; j <= fam.j_max; ++j) {
        SampledField uj = fam.apply(f, j);
        const auto& v = uj.values();
        double w = std::pow(2.0, 2.0 * j * idx.s);
        for (std::size_t i = 0; i < v.size(); ++i) sq[i] += w * std::norm(v[i]);
    }
    double acc = 0.0;
    for (double s2 : sq) acc += std::pow(s2, 0.5 * idx.p);
    return std::pow(acc * g.cell_volume(), 1.0 / idx.p);
}

SampledField peetre_maximal_field(const SampledField& u, double two_j, double M) {
    if (!(M > 0)) throw ConfigError("peetre_maximal: M must be positive");
    const Grid& g = u.grid();
    const auto& v = u.values();
    const int n = g.n_axis;
    std::vector<double> absu(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) absu[i] = std::abs(v[i]);
    std::vector<cplx> out(v.size());
    if (g.dim == 1) {
        parallel_chunks(v.size(), [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t x = b; x < e; ++x) {
                double best = 0.0;
                for (int z = 0; z < n; ++z) {
                    double dy = std::abs(g.coord_of(g.wrap_index(int(x) - z)));
                    double pen = std::pow(1.0 + two_j * dy, M);
                    best = std::max(best, absu[std::size_t(z)] / pen);
                }
                out[x] = best;
            }
        });
    } else if (g.dim == 2) {
        parallel_chunks(v.size(), [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t xf = b; xf < e; ++xf) {
                int x0 = int(xf) / n, x1 = int(xf) % n;
                double best = 0.0;
                for (int z0 = 0; z0 < n; ++z0) {
                    double d0 = g.coord_of(g.wrap_index(x0 - z0));
                    for (int z1 = 0; z1 < n; ++z1) {
                        double d1 = g.coord_of(g.wrap_index(x1 - z1));
                        double dy = std::sqrt(d0 * d0 + d1 * d1);
                        double pen = std::pow(1.0 + two_j * dy, M);
                        best = std::max(best, absu[std::size_t(z0 * n + z1)] / pen);
                    }
                }
                out[xf] = best;
            }
        });
    } else {
        throw ConfigError("peetre_maximal: exact sup implemented for N <= 2");
    }
    return SampledField::from_values(g, std::move(out));
}

double peetre_lhs(const SampledField& f, const DyadicPair& pair, double s, double p, double M) {
    const Grid& g = f.grid();
    std::vector<double> sq(g.size(), 0.0);
    for (int j = 0; j <= pair.j_max; ++j) {
        SampledField uj = pair.apply_phi(f, j);
        double two_j = std::ldexp(1.0, j) / pair.unit_scale;
        SampledField pj = peetre_maximal_field(uj, two_j, M);
        const auto& v = pj.values();
        double w = std::pow(2.0, 2.0 * j * s);
        for (std::size_t i = 0; i < v.size(); ++i) sq[i] += w * std::norm(v[i]);
    }
    double acc = 0.0;
    for (double s2 : sq) acc += std::pow(s2, 0.5 * p);
    return std::pow(acc * g.cell_volume(), 1.0 / p);
}

} // namespace dbh
