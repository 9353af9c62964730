#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "dbh/dyadic.hpp"
#include "dbh/grid.hpp"

namespace dbh {

// Special Lipschitz domain {y_N > rho(y')} sampled over the first N-1 axes of
// an ambient grid (last axis vertical). The measured slope must stay < 1.
struct SpecialLipschitzDomain {
    Grid grid;                 // ambient grid the graph lives on
    std::vector<double> rho;   // n^{N-1} values, row-major over tangential axes
    double lip_bound = 0.0;    // measured max finite-difference slope

    double rho_at(const int* idx_tan) const;
    bool contains(const std::array<double, 4>& y) const;
    // indicator of omega on the ambient grid
    std::vector<double> mask() const;
};

SpecialLipschitzDomain make_halfspace(const Grid& g, double level = 0.0);
SpecialLipschitzDomain make_graph_domain(const Grid& g,
                                         const std::function<double(const std::array<double, 4>&)>& rho);

// Affine chart y -> Phi(y) = p + R S y with S = diag(1/a,..,1/a, 1) and R
// orthogonal; R is either a signed permutation (exact on the lattice) or a
// 2-D rotation realized by FFT shears.
struct Chart {
    int dim = 2;
    std::array<double, 4> p{0, 0, 0, 0};
    double tangential_stretch = 1.0; // a
    bool is_perm = true;
    std::array<int, 4> perm{0, 1, 2, 3};  // physical axis of chart axis k
    std::array<int, 4> sign{1, 1, 1, 1};
    double rot_angle = 0.0; // 2-D only, when !is_perm
    SpecialLipschitzDomain omega;
    // chart-coordinate window U_nu = Phi({|y_tan| < r_tan, |y_N| < r_ver})
    double r_tan = 1.0, r_ver = 0.5;

    std::array<double, 4> apply(const std::array<double, 4>& y) const;   // Phi(y)
    std::array<double, 4> inverse(const std::array<double, 4>& x) const; // Phi^{-1}(x)
};

// pullback(F)(y) = F(Phi(y)) and pushforward(F)(x) = F(Phi^{-1}(x)),
// band-limited exact up to the zoom direction's Nyquist budget
SampledField chart_pullback(const SampledField& f, const Chart& c);
SampledField chart_pushforward(const SampledField& f, const Chart& c);

struct DomainAtlas {
    Grid grid;
    std::string shape;           // disc | ball4 | polygon
    std::vector<Chart> charts;
    std::vector<double> chi0, chi_inf, mu_inf, cut_U;
    std::vector<std::vector<double>> chi; // per chart
    std::vector<double> delta;           // distance to the boundary (signed ambient)
    std::vector<double> omega_mask;      // indicator of Omega
    double U_factor = 1.25;              // the neighborhood U is the 1.25-dilate
    std::vector<std::array<double, 2>> polygon; // vertices when shape == polygon

    bool inside(const std::array<double, 4>& x) const;
    double distance(const std::array<double, 4>& x) const; // dist(x, bOmega)
    double partition_defect() const; // sup |chi0 + sum chi^2 - 1| near closure
};

DomainAtlas make_atlas(const std::string& shape, int chart_count, const Grid& g);

SampledField distance_field(const DomainAtlas& atlas);

// E f = sum_j psi_j * (1_omega (phi_j * f)); reads f only on omega
SampledField rychkov_extend(const SampledField& f, const SpecialLipschitzDomain& omega,
                            const DyadicPair& pair);

// bounded-domain extension through the partition of unity
SampledField atlas_extend(const SampledField& f, const DomainAtlas& atlas,
                          const DyadicPair& pair);

// cone-directed mollification, defined on all of the closure
SampledField cone_mollify(const SampledField& f, double eps, const DomainAtlas& atlas);

} // namespace dbh
