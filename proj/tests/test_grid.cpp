#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "dbh/field_io.hpp"
#include "dbh/grid.hpp"
#include "dbh/rng.hpp"

using namespace dbh;

namespace {

SampledField gaussian_field(const Grid& g, double sigma) {
    std::vector<cplx> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto x = g.point(i);
        double r2 = 0;
        for (int d = 0; d < g.dim; ++d) r2 += x[std::size_t(d)] * x[std::size_t(d)];
        v[i] = std::exp(-r2 / (2 * sigma * sigma)) / std::pow(2 * std::numbers::pi * sigma * sigma, g.dim / 2.0);
    }
    return SampledField::from_values(g, std::move(v));
}

SampledField random_field(const Grid& g, std::uint64_t seed) {
    CounterRng rng{seed, 0};
    std::vector<cplx> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = cplx(rng.gauss(2 * i), rng.gauss(2 * i + 1));
    return SampledField::from_values(g, std::move(v));
}

// direct double-sum periodic convolution (oracle)
SampledField convolve_oracle(const SampledField& f, const SampledField& g) {
    const Grid& gr = f.grid();
    const auto& a = f.values();
    const auto& b = g.values();
    int n = gr.n_axis;
    std::vector<cplx> out(gr.size(), cplx(0, 0));
    if (gr.dim == 1) {
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                out[std::size_t(x)] += a[std::size_t(gr.wrap_index(x - y))] * b[std::size_t(y)];
    } else {
        REQUIRE(gr.dim == 2);
        for (int x0 = 0; x0 < n; ++x0)
            for (int x1 = 0; x1 < n; ++x1)
                for (int y0 = 0; y0 < n; ++y0)
                    for (int y1 = 0; y1 < n; ++y1) {
                        int i0 = gr.wrap_index(x0 - y0), i1 = gr.wrap_index(x1 - y1);
                        out[std::size_t(x0 * n + x1)] +=
                            a[std::size_t(i0 * n + i1)] * b[std::size_t(y0 * n + y1)];
                    }
    }
    double hv = gr.cell_volume();
    for (auto& z : out) z *= hv;
    return SampledField::from_values(gr, std::move(out));
}

} // namespace

TEST_CASE("make_grid arithmetic and preconditions") {
    Grid g = make_grid(1, 256, 16.0);
    CHECK(g.spacing() == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK_THROWS_AS(make_grid(4, 24, 4.0), ConfigError);
    Grid g2 = make_grid(2, 128, 8.0);
    CHECK(g2.spacing() == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK_THROWS_AS(make_grid(3, 64, 1.0), ConfigError);
    CHECK_THROWS_AS(make_grid(2, 64, -1.0), ConfigError);
}

TEST_CASE("convolution identity element") {
    Grid g = make_grid(1, 128, 8.0);
    SampledField f = gaussian_field(g, 0.5);
    std::vector<cplx> d(g.size(), cplx(0, 0));
    d[0] = 1.0 / g.cell_volume(); // one cell of mass 1/h^N
    SampledField delta = SampledField::from_values(g, std::move(d));
    SampledField out = convolve(f, delta);
    CHECK(l2_dist(out, f) / l2_norm(f) < 1e-13);
}

TEST_CASE("gaussian * gaussian against direct oracle on a 32-point grid") {
    Grid g = make_grid(1, 32, 16.0);
    SampledField a = gaussian_field(g, 1.1);
    SampledField b = gaussian_field(g, 1.3);
    SampledField fast = convolve(a, b);
    SampledField slow = convolve_oracle(a, b);
    CHECK(l2_dist(fast, slow) / l2_norm(slow) < 1e-12);
    // band-limited sigma: matches the analytic composition law (reference
    // periodized over lattice images, like any function on the torus)
    double sc = std::sqrt(1.1 * 1.1 + 1.3 * 1.3);
    std::vector<cplx> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double x = g.coord_of(int(i));
        double acc = 0;
        for (int m = -2; m <= 2; ++m)
            acc += std::exp(-std::pow(x + m * g.period, 2) / (2 * sc * sc)) /
                   std::sqrt(2 * std::numbers::pi * sc * sc);
        v[i] = acc;
    }
    SampledField comp = SampledField::from_values(g, std::move(v));
    CHECK(l2_dist(fast, comp) / l2_norm(comp) < 1e-8);
}

TEST_CASE("convolution commutes and is associative on band-limited fields") {
    Grid g = make_grid(2, 16, 8.0);
    SampledField a = gaussian_field(g, 0.7);
    SampledField b = gaussian_field(g, 0.9);
    SampledField c = gaussian_field(g, 1.2);
    CHECK(l2_dist(convolve(a, b), convolve(b, a)) < 1e-13 * l2_norm(convolve(a, b)));
    SampledField ab_c = convolve(convolve(a, b), c);
    SampledField a_bc = convolve(a, convolve(b, c));
    CHECK(l2_dist(ab_c, a_bc) / l2_norm(ab_c) < 1e-10);
    SampledField oracle = convolve_oracle(a, b);
    CHECK(l2_dist(convolve(a, b), oracle) / l2_norm(oracle) < 1e-11);
}

TEST_CASE("fourier multiplier identity, eigenfunction, inverse pair, composition") {
    Grid g = make_grid(1, 64, 4.0);
    std::vector<cplx> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double x = g.coord_of(int(i));
        v[i] = std::exp(cplx(0, 2 * std::numbers::pi * x / g.period));
    }
    SampledField mode = SampledField::from_values(g, std::move(v));

    SampledField same = fourier_multiplier(mode, [](const std::array<double, 4>&) { return cplx(1, 0); });
    CHECK(l2_dist(same, mode) < 1e-14 * l2_norm(mode));

    SampledField d1 = fourier_multiplier(mode, [](const std::array<double, 4>& xi) {
        return cplx(0, 2 * std::numbers::pi * xi[0]);
    });
    SampledField expect = scale(mode, cplx(0, 2 * std::numbers::pi / g.period));
    CHECK(l2_dist(d1, expect) / l2_norm(expect) < 1e-13);

    SampledField f = random_field(g, 7);
    auto bp = [](double s) {
        return [s](const std::array<double, 4>& xi) {
            double q = 1 + 4 * std::numbers::pi * std::numbers::pi * xi[0] * xi[0];
            return cplx(std::pow(q, s / 2), 0);
        };
    };
    SampledField round = fourier_multiplier(fourier_multiplier(f, bp(0.5)), bp(-0.5));
    CHECK(l2_dist(round, f) / l2_norm(f) < 1e-12);

    // composition = product of symbols, exactly
    auto m1 = [](const std::array<double, 4>& xi) { return cplx(1.0 + xi[0] * xi[0], 0.5); };
    auto m2 = [](const std::array<double, 4>& xi) { return cplx(std::sin(xi[0]), 1.0); };
    SampledField lhs = fourier_multiplier(fourier_multiplier(f, m1), m2);
    SampledField rhs = fourier_multiplier(f, [&](const std::array<double, 4>& xi) { return m1(xi) * m2(xi); });
    CHECK(l2_dist(lhs, rhs) < 1e-13 * l2_norm(rhs));
}

TEST_CASE("spectral derivative basics") {
    Grid g = make_grid(2, 64, 4.0);
    SampledField c = SampledField::from_values(g, std::vector<cplx>(g.size(), cplx(3.5, -1)));
    SampledField dc = derivative(c, {1, 0, 0, 0});
    CHECK(dc.max_abs() < 1e-13);

    std::vector<cplx> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = std::sin(2 * std::numbers::pi * g.point(i)[0] / g.period);
    SampledField s = SampledField::from_values(g, std::move(v));
    SampledField ds = derivative(s, {1, 0, 0, 0});
    double sup = 0;
    const auto& dv = ds.values();
    for (std::size_t i = 0; i < dv.size(); ++i) {
        double ref = 2 * std::numbers::pi / g.period * std::cos(2 * std::numbers::pi * g.point(i)[0] / g.period);
        sup = std::max(sup, std::abs(dv[i] - ref));
    }
    CHECK(sup < 1e-10);

    SampledField f = gaussian_field(g, 0.6);
    SampledField d11 = derivative(f, {1, 1, 0, 0});
    SampledField d1_then_2 = derivative(derivative(f, {0, 1, 0, 0}), {1, 0, 0, 0});
    CHECK(l2_dist(d11, d1_then_2) < 1e-12 * l2_norm(d11));
}

TEST_CASE("lp norms: indicator, scaling, oracle") {
    Grid g = make_grid(1, 128, 8.0);
    std::vector<cplx> v(g.size(), cplx(0, 0));
    for (std::size_t i = 0; i < v.size() / 2; ++i) v[i] = 1.0;
    SampledField ind = SampledField::from_values(g, std::move(v));
    CHECK(lp_norm(ind, 2.0) == doctest::Approx(std::sqrt(g.period / 2)).epsilon(1e-12));

    SampledField f = random_field(g, 3);
    CHECK(lp_norm(scale(f, cplx(-2.5, 0)), 3.0) ==
          doctest::Approx(2.5 * lp_norm(f, 3.0)).epsilon(1e-12));

    // direct re-summation oracle
    double acc = 0;
    for (const auto& z : f.values()) acc += std::pow(std::abs(z), 1.5);
    CHECK(lp_norm(f, 1.5) == doctest::Approx(std::pow(acc * g.spacing(), 1 / 1.5)).epsilon(1e-12));
    CHECK_THROWS_AS(lp_norm(f, 0.5), ConfigError);
}

TEST_CASE("Plancherel") {
    Grid g = make_grid(2, 32, 4.0);
    SampledField f = random_field(g, 11);
    const auto& s = f.spectrum();
    double spec2 = 0;
    for (const auto& z : s) spec2 += std::norm(z);
    spec2 /= g.box_volume();
    CHECK(std::abs(std::sqrt(spec2) - l2_norm(f)) / l2_norm(f) < 1e-12);
}

TEST_CASE("support tags: minkowski sums and wrap detection") {
    Grid g = make_grid(1, 256, 16.0);
    auto bump = [&](double c, double w) {
        std::vector<cplx> v(g.size(), cplx(0, 0));
        for (std::size_t i = 0; i < v.size(); ++i) {
            double x = g.coord_of(int(i));
            if (std::abs(x - c) < w) v[i] = std::exp(-1.0 / (1 - std::pow((x - c) / w, 2)));
        }
        SupportBox box;
        box.lo[0] = c - w;
        box.hi[0] = c + w;
        return SampledField::from_values(g, std::move(v)).with_support(box);
    };
    SampledField a = bump(1.0, 0.5), b = bump(-2.0, 1.0);
    SampledField c = convolve(a, b);
    REQUIRE(c.support_tag().has_value());
    CHECK(c.support_tag()->lo[0] == doctest::Approx(-2.5));
    CHECK(c.support_tag()->hi[0] == doctest::Approx(0.5));

    SampledField wide1 = bump(3.0, 4.0), wide2 = bump(-3.0, 4.5);
    CHECK_THROWS_AS(convolve(wide1, wide2), SupportError);

    // declaring a support the data violates must throw
    SupportBox tiny;
    tiny.lo[0] = 0.9;
    tiny.hi[0] = 1.1;
    CHECK_THROWS_AS(bump(1.0, 0.5).with_support(tiny), SupportError);
}

TEST_CASE("field cache roundtrip") {
    Grid g = make_grid(2, 16, 4.0);
    SampledField f = random_field(g, 21);
    std::string path = (std::filesystem::temp_directory_path() / "dbh_field_test.field").string();
    save_field(path, f);
    SampledField r = load_field(path);
    CHECK(r.grid() == g);
    CHECK(l2_dist(r, f) == 0.0);
    std::filesystem::remove(path);
}
