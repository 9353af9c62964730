#pragma once

#include <vector>

#include "dbh/dyadic.hpp"
#include "dbh/grid.hpp"

namespace dbh {

struct SobolevIndex {
    double s = 0.0;
    double p = 2.0;
};

// Littlewood-Paley family: lambda_0^ radial, == 1 on {|xi| <= knee}, supported
// in {|xi| < 2 knee}; lambda_j^ are the dyadic differences. Two transition
// profiles are available to witness equivalence across admissible bases.
class LPFamily {
public:
    Grid grid;
    int j_max = 0;
    double knee = 1.0;
    int variant = 0;

    const std::vector<cplx>& symbol(int j) const { return symbols_[std::size_t(j)]; }
    SampledField apply(const SampledField& f, int j) const;

    friend LPFamily build_lp_family(const Grid& g, double knee, int variant);
    std::vector<std::vector<cplx>> symbols_;
};

LPFamily build_lp_family(const Grid& g, double knee = 1.0, int variant = 0);

SampledField bessel_potential(const SampledField& f, double s);

// ambient norm ||(I-Delta)^{s/2} f||_{L^p}
double sobolev_norm(const SampledField& f, SobolevIndex idx);

// Littlewood-Paley square-function norm
double lp_norm_sq(const SampledField& f, SobolevIndex idx, const LPFamily& fam);

// Peetre maximal function of a band field u at scale two_j (physical units):
// P(x) = sup_y |u(x-y)| / (1 + two_j |y|)^M, exact over all grid shifts.
SampledField peetre_maximal_field(const SampledField& u, double two_j, double M);

// || (2^{js} P_j^{phi,M} f)_j ||_{L^p(l^2)} with the pair's phi family
double peetre_lhs(const SampledField& f, const DyadicPair& pair, double s, double p, double M);

} // namespace dbh
