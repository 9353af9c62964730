#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dbh/grid.hpp"
#include "dbh/profile1d.hpp"

namespace dbh {

// Bivariate polynomial sum c_{ab} x^a y^b where x stands for the half-scale
// symbol theta^(v/2) and y for theta^(v).
struct Poly2 {
    std::map<std::pair<int, int>, double> c;

    void add(int a, int b, double v) {
        auto key = std::make_pair(a, b);
        c[key] += v;
        if (c[key] == 0.0) c.erase(key);
    }
    cplx eval(cplx x, cplx y) const {
        cplx acc(0, 0);
        for (const auto& [ab, v] : c) {
            cplx t(v, 0);
            for (int i = 0; i < ab.first; ++i) t *= x;
            for (int i = 0; i < ab.second; ++i) t *= y;
            acc += t;
        }
        return acc;
    }
    int max_degree() const {
        int d = 0;
        for (const auto& [ab, v] : c) d = std::max(d, ab.first + ab.second);
        return d;
    }
};

struct DyadicPairOptions {
    int deconv_power = 2;    // R in P(x) = 1 - (1 - x^R)^Q
    int telescope_power = 2; // Q
    double w_halfwidth = 0.45;
    double unit_scale = 0.0; // pair length unit; 0 = auto from the band budget
    double eps_rep_bound = 1e-6;
    int probe_count = 8;
    std::uint64_t seed = 71001;
    bool validate_members = true; // sampled cone-support checks at build
};

// Generator tuned for pair duty: a wide support keeps the L^1 norm (and with
// it every transform power in the deconvolution) of order one. The dual
// Chebyshev bound ||g||_1 >= cosh(M acosh((w+2)/w)) explodes as the support
// narrows, which is why the default pair generator is *not* on [1,2].
MomentGenerator pair_generator(int M, double width = 16.0);

// Cone-supported dyadic resolution pair (phi_j regular, psi_j generalized)
// realized by exact symbols on frequency lattices plus exact periodized
// x-samples of every family member. All member supports lie in
// -K intersect {x_N < -u 2^{-j}} where u is the pair length unit.
class DyadicPair {
public:
    int dim = 1;
    int j_max = 0;
    int moment_order = 0; // M
    double unit_scale = 1.0;
    DyadicPairOptions opts;
    MomentGenerator gen_g; // last-axis profile, support [1, 2] before reflection
    MomentGenerator gen_w; // tangential even profile
    Poly2 psi1_poly;       // psi1^(v) = [P(x)-P(y)]/(x-y) at x = theta^(v/2), y = theta^(v)
    Poly2 psi0_poly;       // psi0^ = P(y)/y
    Grid build_grid;
    double eps_rep = 0.0;        // measured reproducing defect
    double symbol_deficit = 0.0; // sup over lattice of |1 - sum psi_j phi_j|

    // profile transforms at a pair-unit frequency vector v (size dim)
    cplx theta_hat(const double* v) const;
    cplx psi0_hat(const double* v) const;
    cplx psi1_hat(const double* v) const;

    // per-scale symbols on a grid's lattice (cached)
    std::shared_ptr<const std::vector<cplx>> phi_symbol(const Grid& g, int j) const;
    std::shared_ptr<const std::vector<cplx>> psi_symbol(const Grid& g, int j) const;

    SampledField apply_phi(const SampledField& f, int j) const;
    SampledField apply_psi(const SampledField& f, int j) const;

    // exact periodized x-samples of family members
    SampledField sample_phi(int j, const Grid& g) const;
    SampledField sample_psi(int j, const Grid& g) const;
    // a grid fitted to one member (for support/scaling inspection)
    Grid member_grid(int j, int points_per_axis) const;

    // physical support box of a member (exact, from profile supports)
    SupportBox phi_support(int j) const;
    SupportBox psi_support(int j) const;
    // max kernel reach of any member pair at scale >= j (wrap budgeting)
    double max_extent() const;

    // T^r f = sum_j 2^{jr} psi_j * phi_j * f (r = 0: approximate identity)
    SampledField smoothing_T(const SampledField& f, double r) const;

    // measured reproducing defect over seeded band-limited probes on g
    double measure_eps_rep(const Grid& g, int probes, std::uint64_t seed) const;

private:
    struct Caches {
        std::mutex mu;
        std::map<std::string, std::shared_ptr<const std::vector<cplx>>> symbols;
        std::map<std::pair<int, int>, Table1D> fac_tan, fac_ver;
    };
    std::shared_ptr<Caches> cache_ = std::make_shared<Caches>();
    friend DyadicPair build_k_dyadic_pair(const MomentGenerator&, int, int, const Grid&,
                                          const DyadicPairOptions&);

    // separable x-side evaluation of psi members
    double psi_profile_value(const std::array<double, 4>& x_pu, const Poly2& poly) const;
    const Table1D& tan_factor(int a, int b) const;
    const Table1D& ver_factor(int a, int b) const;
};

// Builds the pair from a 1-D axis generator; the grid fixes the lattice the
// reproducing defect is measured on. Throws on cone-support leakage or when
// eps_rep exceeds the configured bound.
DyadicPair build_k_dyadic_pair(const MomentGenerator& gen, int N, int j_max,
                               const Grid& grid, const DyadicPairOptions& opts = {});

struct HeidemanRow {
    int j = 0, k = 0;
    double integral = 0.0;
};
struct HeidemanReport {
    std::vector<HeidemanRow> rows;
    double fitted_exponent = 0.0; // decay rate of I(j,k) in |j-k| (base 2)
};

// I(j,k) = int |phi_j * psi_k| (1 + 2^{max(j,k)} |x|)^J dx, computed on a
// 1-D fitted grid in pair units; fits log2 I against |j-k|.
HeidemanReport heideman_check(const DyadicPair& pair, int M, double J, int j_lo, int j_hi,
                              bool swap_roles = false);

// content-hash pair cache key (files written by save_pair_cache)
std::string pair_cache_key(int N, int M, const DyadicPairOptions& o, int j_max, const Grid& g);

} // namespace dbh
