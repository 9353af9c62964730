#include <doctest.h>

#include <cmath>

#include "dbh/dyadic.hpp"
#include "dbh/grid.hpp"
#include "dbh/profile1d.hpp"
#include "dbh/rng.hpp"

using namespace dbh;

namespace {

// high-order quadrature oracle for moments of a table (Richardson over stride)
double moment_oracle(const Table1D& t, int k) {
    double full = 0.0, half = 0.0;
    for (std::size_t i = 0; i < t.v.size(); ++i) {
        double x = t.x0 + double(i) * t.h;
        double w = std::pow(x, k) * t.v[i];
        full += w;
        if (i % 2 == 0) half += w;
    }
    full *= t.h;
    half *= 2.0 * t.h;
    return full + (full - half) / 3.0;
}

// scale the cancellation competes against
double moment_mass(const Table1D& t, int k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.v.size(); ++i) {
        double x = t.x0 + double(i) * t.h;
        acc += std::abs(std::pow(x, k) * t.v[i]);
    }
    return acc * t.h;
}

SampledField band_probe(const Grid& g, std::uint64_t seed) {
    CounterRng rng{seed, 5};
    std::vector<cplx> s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = cplx(rng.gauss(2 * i), rng.gauss(2 * i + 1));
    return SampledField::from_spectrum(g, std::move(s));
}

// direct-sum convolution error of the sampled kernel against the symbol path
double sampled_kernel_defect(int n_axis) {
    Grid g = make_grid(1, n_axis, 64.0);
    MomentGenerator gen = build_moment_generator(6, 1.0, 3.0);
    DyadicPairOptions opts;
    opts.unit_scale = 2.0;
    opts.eps_rep_bound = 1e30; // diagnostic pair, reproduction not at issue
    DyadicPair pair = build_k_dyadic_pair(gen, 1, 2, g, opts);

    std::vector<cplx> vals(g.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        double x = g.coord_of(int(i));
        vals[i] = std::exp(-x * x / 8.0);
    }
    SampledField f = SampledField::from_values(g, std::move(vals));

    double worst = 0.0;
    for (int j = 0; j <= 1; ++j) {
        SampledField fast = pair.apply_phi(f, j);
        SampledField phi_x = pair.sample_phi(j, g);
        SampledField slow = convolve(phi_x, f); // spectral product of sampled kernel
        // spot-check the spectral product against the genuine O(n^2) sum
        const auto& kv = phi_x.values();
        const auto& fv = f.values();
        const auto& sv = slow.values();
        int n = g.n_axis;
        for (int x = 0; x < n; x += 997) {
            cplx acc(0, 0);
            for (int y = 0; y < n; ++y)
                acc += kv[std::size_t(y)] * fv[std::size_t(g.wrap_index(x - y))];
            acc *= g.spacing();
            CHECK(std::abs(acc - sv[std::size_t(x)]) < 1e-9 * (1.0 + std::abs(acc)));
        }
        worst = std::max(worst, l2_dist(fast, slow) / l2_norm(fast));
    }
    return worst;
}

} // namespace

TEST_CASE("moment generator: normalization, vanishing moments, support") {
    MomentGenerator m0 = build_moment_generator(0);
    CHECK(std::abs(table_moment(m0.g, 0) - 1.0) < 1e-10);

    MomentGenerator m6 = build_moment_generator(6);
    CHECK(std::abs(moment_oracle(m6.g, 0) - 1.0) / moment_mass(m6.g, 0) < 1e-10);
    for (int k = 1; k <= 6; ++k)
        CHECK(std::abs(moment_oracle(m6.g, k)) / moment_mass(m6.g, k) < 1e-10);
    CHECK(m6.g.eval(0.5) == 0.0);
    CHECK(m6.g.eval(2.5) == 0.0);

    // transform table against the direct slow sum
    for (double u : {0.05, 0.3, 1.7, 9.4}) {
        cplx fast = m6.ghat_eval(u);
        cplx slow = direct_ft(m6.g, u);
        CHECK(std::abs(fast - slow) < 1e-8 * (1.0 + std::abs(slow)));
    }
}

TEST_CASE("pair generator: exact moments, flat band, tame transform") {
    MomentGenerator pg = pair_generator(6);
    CHECK(std::abs(moment_oracle(pg.g, 0) - 1.0) / moment_mass(pg.g, 0) < 1e-10);
    for (int k = 1; k <= 6; ++k)
        CHECK(std::abs(moment_oracle(pg.g, k)) / moment_mass(pg.g, k) < 1e-10);
    // flat where the pair actually evaluates it (band scales like 1/width)
    double band = 0.32 / 16.0, worst = 0.0;
    for (int i = 1; i <= 64; ++i)
        worst = std::max(worst, std::abs(pg.ghat_eval(band * i / 64.0) - 1.0));
    CHECK(worst < 2e-4);
    // the point of the wide support: transform magnitude of order one, so
    // deconvolution powers cancel instead of annihilating in floats
    double gm = 0.0;
    for (int i = 0; i <= 4000; ++i) gm = std::max(gm, std::abs(pg.ghat_eval(6.0 * i / 4000.0)));
    CHECK(gm < 150.0);
    MomentGenerator narrow = build_moment_generator(6); // [1,2] support
    double nm = 0.0;
    for (int i = 0; i <= 4000; ++i) nm = std::max(nm, std::abs(narrow.ghat_eval(6.0 * i / 4000.0)));
    CHECK(nm > 1e3); // the Chebyshev dual bound in action
}

TEST_CASE("1-D pair: reproducing defect at acceptance scale") {
    Grid g = make_grid(1, 1024, 8.0);
    MomentGenerator gen = pair_generator(6);
    DyadicPairOptions opts;
    DyadicPair pair = build_k_dyadic_pair(gen, 1, 8, g, opts);
    CHECK(pair.eps_rep <= 1e-6);

    // r = 0: T^0 f = f up to eps_rep on a probe
    SampledField f = band_probe(g, 99);
    SampledField tf = pair.smoothing_T(f, 0.0);
    CHECK(l2_dist(tf, f) / l2_norm(f) <= pair.eps_rep * 1.0001 + 1e-12);

    // T of zero is zero
    SampledField z = SampledField::zeros(g);
    CHECK(l2_norm(pair.smoothing_T(z, 1.0)) == 0.0);
}

TEST_CASE("direct convolution-sum oracle for the symbol path") {
    // the symbol path is the exact periodized convolution; convolving with
    // the x-sampled kernel instead converges to it as the kernel resolves
    double coarse = sampled_kernel_defect(1024);
    double fine = sampled_kernel_defect(4096);
    CHECK(fine < coarse / 6.0);
    CHECK(fine < 3e-3);
}

TEST_CASE("telescoped symbol sum matches its closed form") {
    Grid g = make_grid(1, 1024, 8.0);
    MomentGenerator gen = pair_generator(6);
    DyadicPair pair = build_k_dyadic_pair(gen, 1, 8, g, DyadicPairOptions{});
    const int R = pair.opts.deconv_power, Q = pair.opts.telescope_power;
    double worst = 0.0;
    for (int k = 0; k < g.n_axis; ++k) {
        cplx acc(0, 0);
        for (int j = 0; j <= pair.j_max; ++j) {
            acc += (*pair.phi_symbol(g, j))[std::size_t(k)] *
                   (*pair.psi_symbol(g, j))[std::size_t(k)];
        }
        double v = pair.unit_scale * std::ldexp(g.freq_of(k), -pair.j_max);
        cplx th = pair.theta_hat(&v);
        cplx thr(1, 0);
        for (int r = 0; r < R; ++r) thr *= th;
        cplx pterm = 1.0 - std::pow(1.0 - thr, Q);
        worst = std::max(worst, std::abs(acc - pterm));
    }
    CHECK(worst < 1e-7);
}

TEST_CASE("member supports and scaling laws") {
    Grid g = make_grid(1, 1024, 8.0);
    MomentGenerator gen = pair_generator(6);
    DyadicPair pair = build_k_dyadic_pair(gen, 1, 8, g, DyadicPairOptions{});

    // phi_3 vanishes at all x with x_N >= -2^{-3} (pair units)
    Grid mg = pair.member_grid(3, 4096);
    SampledField p3 = pair.sample_phi(3, mg);
    const auto& v = p3.values();
    double depth = pair.unit_scale * std::ldexp(1.0, -3);
    double bad = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (mg.coord_of(int(i)) >= -depth) bad = std::max(bad, std::abs(v[i]));
    CHECK(bad == 0.0);

    // psi_4(x) = 2^N psi_3(2x) on shared sample points
    Grid g4 = pair.member_grid(4, 4096);
    SampledField psi4 = pair.sample_psi(4, g4);
    Grid g3 = make_grid(1, g4.n_axis, 2 * g4.period);
    SampledField psi3 = pair.sample_psi(3, g3);
    const auto& a4 = psi4.values();
    const auto& a3 = psi3.values();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a4.size(); ++i) {
        // g3 coordinate 2x sits at the same index because the period doubled
        double ref = 2.0 * a3[i].real();
        num += std::pow(a4[i].real() - ref, 2);
        den += ref * ref;
    }
    CHECK(std::sqrt(num / den) < 1e-8);

    // psi_1 grid moments vanish through order M (relative to same-order mass)
    Grid mg1 = pair.member_grid(1, 8192);
    SampledField psi1 = pair.sample_psi(1, mg1);
    const auto& pv = psi1.values();
    for (int k : {0, 1, 3, 6}) {
        double mk = 0, ref = 0;
        for (std::size_t i = 0; i < pv.size(); ++i) {
            double x = mg1.coord_of(int(i)) / pair.unit_scale;
            mk += std::pow(x, k) * pv[i].real();
            ref += std::abs(std::pow(x, k)) * std::abs(pv[i].real());
        }
        CHECK(std::abs(mk / ref) < 1e-8);
    }
}

TEST_CASE("2-D pair builds and reproduces") {
    Grid g = make_grid(2, 256, 8.0);
    MomentGenerator gen = pair_generator(6);
    DyadicPair pair = build_k_dyadic_pair(gen, 2, 6, g, DyadicPairOptions{});
    CHECK(pair.eps_rep <= 1e-6);
}

TEST_CASE("smoothing operator T^r scale behaviour") {
    Grid g = make_grid(1, 256, 8.0);
    MomentGenerator gen = pair_generator(4);
    DyadicPairOptions opts;
    DyadicPair pair = build_k_dyadic_pair(gen, 1, 6, g, opts);
    SampledField f = band_probe(g, 31);
    SampledField t1 = pair.smoothing_T(f, 1.0);
    SampledField tm1 = pair.smoothing_T(f, -1.0);
    CHECK(l2_norm(t1) > 0.0);
    CHECK(l2_norm(tm1) > 0.0);
    CHECK(l2_norm(t1) > l2_norm(tm1)); // positive weights amplify fine scales
}

TEST_CASE("heideman decay table") {
    // decay in |j-k| only sets in once the scale separation exceeds the
    // generator's width, so this diagnostic uses a narrow-support pair (its
    // reproduction quality is irrelevant here)
    Grid g = make_grid(1, 512, 8.0);
    MomentGenerator gen = build_moment_generator(6, 1.0, 3.0);
    DyadicPairOptions opts;
    opts.unit_scale = 1.0;
    opts.eps_rep_bound = 1e30;
    DyadicPair pair = build_k_dyadic_pair(gen, 1, 6, g, opts);
    HeidemanReport rep = heideman_check(pair, 3, 2.0, 1, 5);
    for (const auto& r : rep.rows)
        if (r.j == r.k) CHECK(r.integral > 0.0);
    CHECK(rep.fitted_exponent >= 3.0 - 0.5);
    HeidemanReport swapped = heideman_check(pair, 3, 2.0, 1, 5, true);
    CHECK(swapped.fitted_exponent >= 3.0 - 0.5);
}
