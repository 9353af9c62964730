#pragma once

#include <complex>
#include <vector>

#include "dbh/grid.hpp"

namespace dbh {

// Uniform-grid samples of a compactly supported real function, with the
// support interval tracked exactly: eval() returns literal zero outside it.
struct Table1D {
    double x0 = 0.0;
    double h = 0.0;
    std::vector<double> v;
    double sup_lo = 0.0;
    double sup_hi = 0.0;

    double x_end() const { return x0 + h * double(v.size() - 1); }
    double eval(double x) const; // 6-point Lagrange inside, 0 outside support
};

// Samples of a transform g^(u) on u >= 0 with conjugate symmetry (g real).
struct SpectrumTable1D {
    double du = 0.0;
    std::vector<cplx> v; // u = k*du, k = 0..K
    cplx eval(double u) const; // 0 beyond the table (rapid decay regime)
};

struct MomentGenerator {
    Table1D g;
    int moment_order = 0;           // exact vanishing of t^k, 1 <= k <= M
    double sup_lo = 0.0, sup_hi = 0.0;
    std::vector<double> moments;    // computed moments 0..moment_order+12
    SpectrumTable1D ghat;
    Table1D cumint;                 // V(y) = int_{-inf}^{y} g

    cplx ghat_eval(double u) const {
        if (u >= 0) return ghat.eval(u);
        return std::conj(ghat.eval(-u));
    }
    // V(y) with the correct flat continuation on both sides
    double V_eval(double y) const {
        if (y <= sup_lo) return 0.0;
        if (y >= sup_hi) return moments.empty() ? 1.0 : moments[0];
        return cumint.eval(y);
    }
    // (g^(u) - g^(2u)) / (2 pi i u): transform of the antiderivative of the
    // dyadic difference g_j; series from the computed moments near u = 0.
    cplx bracket_eval(double u) const;
};

// g = p(t) b(t) with b a fixed smooth bump on [a,b] and p solving the
// (M+1)x(M+1) moment system int t^k g = delta_{k0}, 0 <= k <= M.
// flat_degree > M adds least-squares flattening of g^ over [0, flat_band]
// subject to the same exact moment constraints (used by the dyadic pair,
// which needs g^ ~ 1 well beyond the Taylor radius).
MomentGenerator build_moment_generator(int M, double a = 1.0, double b = 2.0,
                                       int flat_degree = -1, double flat_band = 0.0);

// Even bump on [-halfwidth, halfwidth] with the same moment normalization
// (odd moments vanish by symmetry).
MomentGenerator build_even_bump(int M, double halfwidth,
                                int flat_degree = -1, double flat_band = 0.0);

// Direct slow Fourier sum over a table (oracle-grade).
cplx direct_ft(const Table1D& t, double u);

// 1-D convolution of tables on a common step (FFT-based); the support of the
// result is set to the sum of supports and values outside it are zeroed.
Table1D convolve_tables(const Table1D& a, const Table1D& b);

// Dilation x -> s^{-1} f(x/s) preserving mass (L^1 normalization).
Table1D dilate_table(const Table1D& t, double s);

Table1D scale_table(const Table1D& t, double c);
Table1D add_tables(const Table1D& a, const Table1D& b);

double table_moment(const Table1D& t, int k);

} // namespace dbh
