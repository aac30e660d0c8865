#pragma once

#include <vector>

#include "mscv/kinetic.hpp"
#include "mscv/phase_space.hpp"

namespace mscv {

// Conserved variables per cell; gamma = 2, p = rho T, E = rho|u|^2/2 + rho T.
struct EulerState {
    SpatialGrid xgrid;
    std::vector<double> rho, m1, m2, E;

    EulerState() = default;
    explicit EulerState(const SpatialGrid& xg)
        : xgrid(xg), rho(xg.n_cells), m1(xg.n_cells), m2(xg.n_cells), E(xg.n_cells) {}
    int nx() const { return xgrid.n_cells; }
};

constexpr double kEulerGamma = 2.0;

EulerState euler_from_moments(const MomentVector& m, const SpatialGrid& xg);
MomentVector euler_moments(const EulerState& U);

// 0.9 dx / max(|u1| + sqrt(gamma T)).
double euler_max_dt(const EulerState& U);

// MUSCL-Hancock (minmod on conserved variables) with Rusanov fluxes. A diffusive
// wall uses the half-range Maxwellian flux of the kinetic wall condition.
void euler_step(EulerState& U, double dt, const BoundarySpec& bc);

// Advance to each output time (nondecreasing), returning the moments there.
std::vector<MomentVector> euler_solve(EulerState U, const std::vector<double>& times, const BoundarySpec& bc);

DistributionField euler_equilibrium(const EulerState& U, const VelocityGrid& vg);

}  // namespace mscv
