#pragma once

#include <optional>
#include <vector>

#include "mscv/boltzmann.hpp"
#include "mscv/phase_space.hpp"

namespace mscv {

// nu = value (constant) or nu = value * rho (proportional).
struct NuLaw {
    enum class Kind { constant, proportional };
    Kind kind = Kind::proportional;
    double value = 1.0;

    double nu(double rho) const { return kind == Kind::constant ? value : value * rho; }
};

// Parses "rho", "0.125rho", "<c>rho", "const:<v>" or a bare number (constant).
NuLaw parse_nu_law(const std::string& s);

struct BgkConfig {
    NuLaw nu_law;
    double epsilon = 1e-2;
};

enum class BcKind { periodic, transmissive, diffusive_wall };

struct BoundarySpec {
    BcKind left = BcKind::transmissive;
    BcKind right = BcKind::transmissive;
    double wall_T_left = 1.0;   // used when left is diffusive_wall
    double wall_T_right = 1.0;  // used when right is diffusive_wall
};

// Largest step the kinetic solvers accept: min(dx/(2 v_max), eps).
double kinetic_dt(const SpatialGrid& xg, const VelocityGrid& vg, double epsilon);

// Ghost values for a diffusive wall. `f_wall` is the cell adjacent to the wall,
// `into_domain` is +1 for a left wall (re-emission has v1 > 0) and -1 for a right wall.
// Re-emitted half: rho_w * M(1, 0, T_w); other half copied from f_wall.
// Returns rho_w.
double diffusive_wall_bc(const double* f_wall, const VelocityGrid& vg, double T_w, int into_domain, double* ghost);

// Half-open free transport v1 d/dx over dt with second-order MUSCL (minmod).
void transport_step(DistributionField& f, double dt, const BoundarySpec& bc);

// One Strang step: transport dt/2, exact BGK relaxation dt, transport dt/2.
void bgk_step(DistributionField& f, const BgkConfig& cfg, double dt, const BoundarySpec& bc);

// Exact relaxation substep only (moments unchanged up to round-off).
void bgk_relax(DistributionField& f, const BgkConfig& cfg, double dt);

// One Strang step for the full model: collision substep by Heun's method on Q/eps.
void boltzmann_step(DistributionField& f, BoltzmannOperator& op, double epsilon, double dt,
                    const BoundarySpec& bc);

struct KineticSolver {
    enum class Model { bgk, boltzmann };
    Model model = Model::bgk;
    BgkConfig bgk;                      // bgk
    BoltzmannOperator* op = nullptr;    // boltzmann
    double epsilon = 1e-2;              // boltzmann
    double dt = 0.0;                    // 0: largest admissible step
};

// Strang-split solve to each output time (nondecreasing, >= 0). Steps are shortened
// to land on the outputs. Returns the moments there, and the fields if asked.
std::vector<MomentVector> kinetic_solve(DistributionField f, const KineticSolver& solver, const std::vector<double>& times,
                                        const BoundarySpec& bc, std::vector<DistributionField>* fields = nullptr);

DistributionField bgk_homogeneous_exact(const DistributionField& f0, double nu, double t);

enum class HomogeneousModel { bgk_exact, boltzmann_rk4 };

struct HomogeneousParams {
    double nu = 1.0;         // bgk_exact
    double dt = 0.05;        // boltzmann_rk4
    double epsilon = 1.0;    // df/dt = Q/eps
    BoltzmannConfig boltzmann;
};

// Fields at the requested (nondecreasing, >= 0) output times.
std::vector<DistributionField> homogeneous_solve(const DistributionField& f0, HomogeneousModel model,
                                                 const std::vector<double>& times, const HomogeneousParams& p);

// Same, reusing a prebuilt operator.
std::vector<DistributionField> homogeneous_solve(const DistributionField& f0, BoltzmannOperator& op,
                                                 const std::vector<double>& times, double dt, double epsilon);

}  // namespace mscv
