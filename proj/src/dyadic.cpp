#include "dbh/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dbh/parallel.hpp"
#include "dbh/rng.hpp"

namespace dbh {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

// P(x) = 1 - (1 - x^R)^Q = sum_{k>=1} binom(Q,k) (-1)^{k+1} x^{Rk}
std::vector<std::pair<int, double>> p_poly(int R, int Q) {
    std::vector<std::pair<int, double>> terms;
    for (int k = 1; k <= Q; ++k) terms.emplace_back(R * k, binom(Q, k) * ((k % 2) ? 1.0 : -1.0));
    return terms;
}

} // namespace

MomentGenerator pair_generator(int M, double width) {
    return build_moment_generator(M, 1.0, 1.0 + width, M + 20, 0.32 / width);
}

cplx DyadicPair::theta_hat(const double* v) const {
    cplx acc(1, 0);
    for (int a = 0; a < dim - 1; ++a) acc *= gen_w.ghat_eval(v[a]);
    // last axis carries the reflected generator g(-t)
    acc *= std::conj(gen_g.ghat_eval(v[dim - 1]));
    return acc;
}

cplx DyadicPair::psi0_hat(const double* v) const {
    cplx y = theta_hat(v);
    return psi0_poly.eval(cplx(0, 0), y);
}

cplx DyadicPair::psi1_hat(const double* v) const {
    double vh[4];
    for (int a = 0; a < dim; ++a) vh[a] = 0.5 * v[a];
    return psi1_poly.eval(theta_hat(vh), theta_hat(v));
}

std::shared_ptr<const std::vector<cplx>> DyadicPair::phi_symbol(const Grid& g, int j) const {
    std::ostringstream key;
    key << "phi:" << g.dim << ":" << g.n_axis << ":" << g.period << ":" << j;
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->symbols.find(key.str());
        if (it != cache_->symbols.end()) return it->second;
    }
    auto out = std::make_shared<std::vector<cplx>>(g.size());
    const double lam = unit_scale;
    parallel_chunks(g.size(), [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            auto xi = g.freq(i);
            double vj[4], vjm[4];
            for (int a = 0; a < g.dim; ++a) {
                vj[a] = lam * std::ldexp(xi[a], -j);
                vjm[a] = 2.0 * vj[a];
            }
            (*out)[i] = (j == 0) ? theta_hat(vj) : theta_hat(vj) - theta_hat(vjm);
        }
    });
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto sp = std::shared_ptr<const std::vector<cplx>>(out);
    cache_->symbols[key.str()] = sp;
    return sp;
}

std::shared_ptr<const std::vector<cplx>> DyadicPair::psi_symbol(const Grid& g, int j) const {
    std::ostringstream key;
    key << "psi:" << g.dim << ":" << g.n_axis << ":" << g.period << ":" << j;
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->symbols.find(key.str());
        if (it != cache_->symbols.end()) return it->second;
    }
    auto out = std::make_shared<std::vector<cplx>>(g.size());
    const double lam = unit_scale;
    parallel_chunks(g.size(), [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            auto xi = g.freq(i);
            double v[4];
            for (int a = 0; a < g.dim; ++a)
                v[a] = lam * std::ldexp(xi[a], j == 0 ? 0 : 1 - j);
            (*out)[i] = (j == 0) ? psi0_hat(v) : psi1_hat(v);
        }
    });
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto sp = std::shared_ptr<const std::vector<cplx>>(out);
    cache_->symbols[key.str()] = sp;
    return sp;
}

SampledField DyadicPair::apply_phi(const SampledField& f, int j) const {
    return apply_multiplier(f, *phi_symbol(f.grid(), j));
}
SampledField DyadicPair::apply_psi(const SampledField& f, int j) const {
    return apply_multiplier(f, *psi_symbol(f.grid(), j));
}

const Table1D& DyadicPair::tan_factor(int a, int b) const {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto key = std::make_pair(a, b);
    auto it = cache_->fac_tan.find(key);
    if (it != cache_->fac_tan.end()) return it->second;
    Table1D t;
    if (a >= 1) {
        Table1D w2 = dilate_table(gen_w.g, 0.5);
        t = w2;
        for (int i = 1; i < a; ++i) t = convolve_tables(t, w2);
        for (int i = 0; i < b; ++i) t = convolve_tables(t, gen_w.g);
    } else {
        t = gen_w.g;
        for (int i = 1; i < b; ++i) t = convolve_tables(t, gen_w.g);
    }
    return cache_->fac_tan.emplace(key, std::move(t)).first->second;
}

const Table1D& DyadicPair::ver_factor(int a, int b) const {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto key = std::make_pair(a, b);
    auto it = cache_->fac_ver.find(key);
    if (it != cache_->fac_ver.end()) return it->second;
    Table1D gref = dilate_table(gen_g.g, -1.0);
    Table1D t;
    if (a >= 1) {
        Table1D g2 = dilate_table(gref, 0.5);
        t = g2;
        for (int i = 1; i < a; ++i) t = convolve_tables(t, g2);
        for (int i = 0; i < b; ++i) t = convolve_tables(t, gref);
    } else {
        t = gref;
        for (int i = 1; i < b; ++i) t = convolve_tables(t, gref);
    }
    return cache_->fac_ver.emplace(key, std::move(t)).first->second;
}

double DyadicPair::psi_profile_value(const std::array<double, 4>& x, const Poly2& poly) const {
    double acc = 0.0;
    for (const auto& [ab, coef] : poly.c) {
        double term = coef * ver_factor(ab.first, ab.second).eval(x[std::size_t(dim - 1)]);
        if (term == 0.0) continue;
        for (int a = 0; a < dim - 1 && term != 0.0; ++a)
            term *= tan_factor(ab.first, ab.second).eval(x[std::size_t(a)]);
        acc += term;
    }
    return acc;
}

namespace {
// support of the (a,b) monomial factor along one axis given base supports
void monomial_interval(double lo1, double hi1, int a, int b, double& lo, double& hi) {
    // fine dilate halves the base interval
    lo = 0.5 * lo1 * a + lo1 * b;
    hi = 0.5 * hi1 * a + hi1 * b;
}
} // namespace

SupportBox DyadicPair::psi_support(int j) const {
    const Poly2& poly = (j == 0) ? psi0_poly : psi1_poly;
    double vlo = 0, vhi = -1e300, tlo = 0, thi = 0;
    for (const auto& [ab, coef] : poly.c) {
        double lo, hi;
        monomial_interval(-gen_g.sup_hi, -gen_g.sup_lo, ab.first, ab.second, lo, hi);
        vlo = std::min(vlo, lo);
        vhi = std::max(vhi, hi);
        double wl, wh;
        monomial_interval(-gen_w.sup_hi, gen_w.sup_hi, ab.first, ab.second, wl, wh);
        tlo = std::min(tlo, wl);
        thi = std::max(thi, wh);
    }
    double s = unit_scale * std::ldexp(1.0, j == 0 ? 0 : 1 - j);
    SupportBox box;
    for (int a = 0; a < dim - 1; ++a) {
        box.lo[std::size_t(a)] = s * tlo;
        box.hi[std::size_t(a)] = s * thi;
    }
    box.lo[std::size_t(dim - 1)] = s * vlo;
    box.hi[std::size_t(dim - 1)] = s * vhi;
    return box;
}

SupportBox DyadicPair::phi_support(int j) const {
    // union of the two dilates of supp theta0
    double s_fine = unit_scale * std::ldexp(1.0, -j);
    double s_coarse = unit_scale * std::ldexp(1.0, -(j - 1));
    double s_max = (j == 0) ? s_fine : s_coarse;
    SupportBox box;
    for (int a = 0; a < dim - 1; ++a) {
        box.lo[std::size_t(a)] = -gen_w.sup_hi * s_max;
        box.hi[std::size_t(a)] = gen_w.sup_hi * s_max;
    }
    box.lo[std::size_t(dim - 1)] = -gen_g.sup_hi * s_max;
    box.hi[std::size_t(dim - 1)] = -gen_g.sup_lo * s_fine;
    return box;
}

double DyadicPair::max_extent() const {
    double m = 0.0;
    for (int j = 0; j <= 1; ++j) {
        SupportBox p = phi_support(j), q = psi_support(j);
        for (int a = 0; a < dim; ++a) {
            m = std::max({m, std::abs(p.lo[std::size_t(a)]), std::abs(p.hi[std::size_t(a)]),
                          std::abs(q.lo[std::size_t(a)]), std::abs(q.hi[std::size_t(a)])});
        }
    }
    return m;
}

namespace {

SampledField sample_periodized(const Grid& g, const SupportBox& box,
                               const std::function<double(const std::array<double, 4>&)>& fn,
                               int dim) {
    // image ranges per axis so that x + m L can hit the support box
    int mlo[4] = {0, 0, 0, 0}, mhi[4] = {0, 0, 0, 0};
    for (int a = 0; a < dim; ++a) {
        mlo[a] = int(std::floor((box.lo[std::size_t(a)] - 0.5 * g.period) / g.period)) ;
        mhi[a] = int(std::ceil((box.hi[std::size_t(a)] + 0.5 * g.period) / g.period));
    }
    std::vector<cplx> vals(g.size());
    parallel_chunks(g.size(), [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            auto x = g.point(i);
            double acc = 0.0;
            int m[4];
            for (m[0] = mlo[0]; m[0] <= mhi[0]; ++m[0])
                for (m[1] = mlo[1]; m[1] <= mhi[1]; ++m[1])
                    for (m[2] = mlo[2]; m[2] <= mhi[2]; ++m[2])
                        for (m[3] = mlo[3]; m[3] <= mhi[3]; ++m[3]) {
                            std::array<double, 4> xx = x;
                            bool in = true;
                            for (int a = 0; a < dim; ++a) {
                                xx[std::size_t(a)] += m[a] * g.period;
                                if (xx[std::size_t(a)] < box.lo[std::size_t(a)] - 1e-12 ||
                                    xx[std::size_t(a)] > box.hi[std::size_t(a)] + 1e-12)
                                    in = false;
                            }
                            if (in) acc += fn(xx);
                        }
            vals[i] = acc;
        }
    });
    return SampledField::from_values(g, std::move(vals));
}

} // namespace

SampledField DyadicPair::sample_psi(int j, const Grid& g) const {
    if (g.dim != dim) throw ConfigError("sample_psi: dimension mismatch");
    const Poly2& poly = (j == 0) ? psi0_poly : psi1_poly;
    double s = std::ldexp(1.0, j == 0 ? 0 : j - 1) / unit_scale; // x -> s x in pair units
    double amp = std::pow(s, dim);
    SupportBox box = psi_support(j);
    return sample_periodized(g, box, [&](const std::array<double, 4>& x) {
        std::array<double, 4> xp{0, 0, 0, 0};
        for (int a = 0; a < dim; ++a) xp[std::size_t(a)] = x[std::size_t(a)] * s;
        return amp * psi_profile_value(xp, poly);
    }, dim);
}

SampledField DyadicPair::sample_phi(int j, const Grid& g) const {
    if (g.dim != dim) throw ConfigError("sample_phi: dimension mismatch");
    double s_f = std::ldexp(1.0, j) / unit_scale;
    double s_c = std::ldexp(1.0, j - 1) / unit_scale;
    Table1D gref = dilate_table(gen_g.g, -1.0);
    auto theta = [&](const std::array<double, 4>& x, double s) {
        double t = gref.eval(x[std::size_t(dim - 1)] * s);
        for (int a = 0; a < dim - 1 && t != 0.0; ++a) t *= gen_w.g.eval(x[std::size_t(a)] * s);
        return t;
    };
    SupportBox box = phi_support(j);
    return sample_periodized(g, box, [&](const std::array<double, 4>& x) {
        double v = std::pow(s_f, dim) * theta(x, s_f);
        if (j > 0) v -= std::pow(s_c, dim) * theta(x, s_c);
        return v;
    }, dim);
}

Grid DyadicPair::member_grid(int j, int points_per_axis) const {
    SupportBox pb = phi_support(j), qb = psi_support(j);
    double ext = 0.0;
    for (int a = 0; a < dim; ++a)
        ext = std::max({ext, std::abs(pb.lo[std::size_t(a)]), std::abs(qb.lo[std::size_t(a)]),
                        std::abs(pb.hi[std::size_t(a)]), std::abs(qb.hi[std::size_t(a)])});
    return make_grid(dim, points_per_axis, 2.5 * ext);
}

SampledField DyadicPair::smoothing_T(const SampledField& f, double r) const {
    const Grid& g = f.grid();
    std::vector<cplx> mult(g.size(), cplx(0, 0));
    for (int j = 0; j <= j_max; ++j) {
        auto ph = phi_symbol(g, j);
        auto ps = psi_symbol(g, j);
        double w = std::ldexp(1.0, 0) * std::pow(2.0, double(j) * r);
        for (std::size_t i = 0; i < mult.size(); ++i) mult[i] += w * (*ph)[i] * (*ps)[i];
    }
    return apply_multiplier(f, mult);
}

double DyadicPair::measure_eps_rep(const Grid& g, int probes, std::uint64_t seed) const {
    // reproduction multiplier assembled from the actual per-scale symbols
    std::vector<cplx> S(g.size(), cplx(0, 0));
    for (int j = 0; j <= j_max; ++j) {
        auto ph = phi_symbol(g, j);
        auto ps = psi_symbol(g, j);
        for (std::size_t i = 0; i < S.size(); ++i) S[i] += (*ph)[i] * (*ps)[i];
    }
    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
        CounterRng rng{seed, std::uint64_t(p)};
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < S.size(); ++i) {
            cplx c(rng.gauss(2 * i), rng.gauss(2 * i + 1));
            num += std::norm((S[i] - 1.0) * c);
            den += std::norm(c);
        }
        worst = std::max(worst, std::sqrt(num / den));
    }
    return worst;
}

DyadicPair build_k_dyadic_pair(const MomentGenerator& gen, int N, int j_max,
                               const Grid& grid, const DyadicPairOptions& opts) {
    if (N != grid.dim) throw ConfigError("build_k_dyadic_pair: grid dimension mismatch");
    if (j_max < 1) throw ConfigError("build_k_dyadic_pair: j_max must be >= 1");
    DyadicPair p;
    p.dim = N;
    p.j_max = j_max;
    p.moment_order = gen.moment_order;
    p.opts = opts;
    // default unit: put the top lattice frequency at argument ~0.125/width of
    // the generator transform, where the moment cancellation holds tightly
    double gwidth = std::max(1.0, gen.sup_hi - gen.sup_lo);
    p.unit_scale = opts.unit_scale > 0
                       ? opts.unit_scale
                       : 0.125 * grid.period * std::ldexp(2.0, j_max) / (grid.n_axis * gwidth);
    p.gen_g = gen;
    p.gen_w = build_even_bump(gen.moment_order, opts.w_halfwidth);
    p.build_grid = grid;

    const int R = opts.deconv_power, Q = opts.telescope_power;
    if (R < 2 || Q < 2)
        throw ConfigError("build_k_dyadic_pair: deconvolution powers must be >= 2 "
                          "(cone-supported factorization)");
    // psi0^ = P(y)/y, psi1^ = [P(x) - P(y)]/(x - y)
    for (const auto& [pw, cf] : p_poly(R, Q)) {
        p.psi0_poly.add(0, pw - 1, cf);
        for (int r = 0; r < pw; ++r) p.psi1_poly.add(r, pw - 1 - r, cf);
    }


    p.eps_rep = p.measure_eps_rep(grid, opts.probe_count, opts.seed);
    {
        std::vector<cplx> S(grid.size(), cplx(0, 0));
        for (int j = 0; j <= j_max; ++j) {
            auto ph = p.phi_symbol(grid, j);
            auto ps = p.psi_symbol(grid, j);
            for (std::size_t i = 0; i < S.size(); ++i) S[i] += (*ph)[i] * (*ps)[i];
        }
        double d = 0.0;
        for (const auto& s : S) d = std::max(d, std::abs(s - 1.0));
        p.symbol_deficit = d;
    }
    if (p.eps_rep > opts.eps_rep_bound) {
        std::ostringstream msg;
        msg << "build_k_dyadic_pair: reproducing defect " << p.eps_rep
            << " exceeds bound " << opts.eps_rep_bound
            << " (symbol deficit " << p.symbol_deficit << ")";
        throw NumericError(msg.str());
    }

    if (opts.validate_members) {
        // sampled cone-support leakage on fitted member grids
        int npts = N == 4 ? 16 : (N == 2 ? 128 : 2048);
        for (int j = 0; j <= std::min(j_max, 4); ++j) {
            Grid mg = p.member_grid(j, npts);
            for (int fam = 0; fam < 2; ++fam) {
                SampledField m = fam ? p.sample_psi(j, mg) : p.sample_phi(j, mg);
                const auto& v = m.values();
                double mx = 0, leak = 0;
                double depth = p.unit_scale * std::ldexp(1.0, -j);
                double slack = 2.0 * mg.spacing();
                for (std::size_t i = 0; i < v.size(); ++i) {
                    double av = std::abs(v[i]);
                    mx = std::max(mx, av);
                    auto x = mg.point(i);
                    double xn = x[std::size_t(N - 1)];
                    double tn = 0.0;
                    for (int a = 0; a < N - 1; ++a) tn += x[std::size_t(a)] * x[std::size_t(a)];
                    tn = std::sqrt(tn);
                    bool inside = (xn < -depth + slack) && (tn < -xn + slack);
                    if (!inside) leak = std::max(leak, av);
                }
                if (mx > 0 && leak > 1e-12 * mx)
                    throw SupportError("build_k_dyadic_pair: cone-support leakage at scale " +
                                       std::to_string(j));
            }
        }
    }
    return p;
}

HeidemanReport heideman_check(const DyadicPair& pair, int M, double J, int j_lo, int j_hi,
                              bool swap_roles) {
    if (pair.moment_order < M)
        throw ConfigError("heideman_check: families have moment order below M");
    HeidemanReport rep;
    // work in pair units on dedicated 1-D grids
    for (int j = j_lo; j <= j_hi; ++j) {
        for (int k = j_lo; k <= j_hi; ++k) {
            int jf = swap_roles ? k : j, kf = swap_roles ? j : k;
            double ext = 12.0 * std::ldexp(1.0, -std::min(jf, kf)) + 4.0;
            Grid g1 = make_grid(1, 8192, 2.2 * ext);
            // symbols in pair units: evaluate profiles directly
            std::vector<cplx> spec(g1.size());
            for (std::size_t i = 0; i < spec.size(); ++i) {
                double xi = g1.freq_of(int(i));
                double vphi = std::ldexp(xi, -jf);
                double vphi2 = 2.0 * vphi;
                cplx ph = (jf == 0) ? pair.theta_hat(&vphi)
                                    : pair.theta_hat(&vphi) - pair.theta_hat(&vphi2);
                double vpsi = std::ldexp(xi, kf == 0 ? 0 : 1 - kf);
                cplx ps;
                if (kf == 0) {
                    ps = pair.psi0_hat(&vpsi);
                } else {
                    double vh = 0.5 * vpsi;
                    ps = pair.psi1_poly.eval(pair.theta_hat(&vh), pair.theta_hat(&vpsi));
                }
                spec[i] = ph * ps;
            }
            SampledField conv = SampledField::from_spectrum(g1, std::move(spec));
            const auto& v = conv.values();
            double I = 0.0, w2 = std::ldexp(1.0, std::max(j, k));
            for (std::size_t i = 0; i < v.size(); ++i) {
                double x = g1.coord_of(int(i));
                I += std::abs(v[i]) * std::pow(1.0 + w2 * std::abs(x), J);
            }
            I *= g1.spacing();
            rep.rows.push_back({j, k, I});
        }
    }
    // least-squares slope of log2 I against |j-k|
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& r : rep.rows) {
        if (r.integral <= 0) continue;
        double d = std::abs(r.j - r.k);
        double y = std::log2(r.integral);
        sx += d;
        sy += y;
        sxx += d * d;
        sxy += d * y;
        ++n;
    }
    double denom = n * sxx - sx * sx;
    rep.fitted_exponent = denom != 0 ? -(n * sxy - sx * sy) / denom : 0.0;
    return rep;
}

std::string pair_cache_key(int N, int M, const DyadicPairOptions& o, int j_max, const Grid& g) {
    std::ostringstream s;
    s << "pair|N=" << N << "|M=" << M << "|R=" << o.deconv_power << "|Q=" << o.telescope_power
      << "|w=" << o.w_halfwidth
      << "|jmax=" << j_max << "|n=" << g.n_axis << "|L=" << g.period << "|u=" << o.unit_scale;
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s.str()) {
        h ^= std::uint64_t(static_cast<unsigned char>(c));
        h *= 1099511628211ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace dbh
