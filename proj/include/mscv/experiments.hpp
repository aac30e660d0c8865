#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mscv/estimators.hpp"
#include "mscv/kinetic.hpp"

namespace mscv {

enum class EstimatorKind { mc, mscv, mscv2, mscvh2, mlmc };
enum class ModelKind { boltzmann, bgk, euler };

EstimatorKind parse_estimator(const std::string& s);
std::string estimator_name(EstimatorKind e);
ModelKind parse_model(const std::string& s);
std::string model_name(ModelKind m);

// Negative epsilon / tf and zero dt mean "test default".
struct ExperimentConfig {
    int test = 1;
    std::vector<EstimatorKind> estimators{EstimatorKind::mc};
    WeightMode weights = WeightMode::optimal;
    std::size_t M = 100;
    std::vector<std::size_t> cv_samples;  // coarse -> fine
    double epsilon = -1.0;
    int nx = 100;
    int nv = 32;
    double vmax = 8.0;
    double tf = -1.0;
    double dt = 0.0;
    NuLaw nu_law{NuLaw::Kind::proportional, 1.0};        // BGK control variate
    ModelKind model = ModelKind::boltzmann;              // full model
    NuLaw truth_nu_law{NuLaw::Kind::proportional, 0.5};  // full model when model = bgk
    int n_modes = 32;
    int repeats = 10;
    std::uint64_t seed = 42;
    std::string out;
    std::vector<double> times;  // empty: 25 uniform checkpoints on [0, tf]
    int quadrature_order = 32;
    std::string cache_dir;  // empty: no disk cache for references
};

// Fills the per-test defaults and validates. Throws std::invalid_argument.
ExperimentConfig resolve(ExperimentConfig cfg);

// Per-time output vector of every model:
//   Test 1:    f on the velocity grid (n*n), then density, temperature (1 each)
//   Tests 2-3: density per cell, then temperature per cell
struct Layout {
    std::size_t n_dist = 0;
    std::size_t rho_off = 0, T_off = 0, n_cells = 1;
    std::size_t size() const { return T_off + n_cells; }
};

struct Problem {
    ExperimentConfig cfg;  // resolved
    std::vector<double> times;
    Layout layout;
    VelocityGrid vgrid;
    SpatialGrid xgrid;
    BoundarySpec bc;
    Model truth;
    Model bgk;          // nu_law
    Model bgk_alt;      // 0.125 rho, second BGK control variate
    Model equilibrium;  // Test 1: Maxwellian of the initial moments; Tests 2-3: Euler
    Model initial;      // Test 1 only: the initial datum
    double cost_truth = 1, cost_bgk = 1, cost_equilibrium = 1;
};

Problem make_problem(const ExperimentConfig& cfg);

DistributionField test1_initial(double z, const VelocityGrid& vg);
MomentVector sod_initial(double z, const SpatialGrid& xg);
double test3_wall_temperature(double z);

// E[model] per output time by Gauss-Legendre quadrature in z.
std::vector<std::vector<double>> quadrature_expectation(const Model& m, int order, std::size_t n_times);

// Quadrature expectation of the full model, cached on disk under cfg.cache_dir.
std::vector<std::vector<double>> reference_solution(const Problem& p);

struct CostModel {
    double C = 1.0, C1 = 1.0 / 1.25, C2 = 1.0;
    int n_angles = 8;
};
// Analytic cost of one evaluation of each model kind.
double model_unit_cost(ModelKind kind, int nv, int nx, const CostModel& c = {});

struct ErrorRecord {
    double time = 0;
    std::string estimator;
    std::string quantity;  // distribution | density | temperature
    double error = 0;
    double cost = 0;
};

struct CostReport {
    std::string estimator;
    double analytic = 0;      // per repetition
    double wall_seconds = 0;  // summed over repetitions
};

struct ExperimentResult {
    std::vector<ErrorRecord> records;
    std::vector<CostReport> costs;
};

// Pipeline settings for one estimator on a problem. `cv_expect` supplies control
// variate expectations for the estimators that use them exactly (Test 1).
PipelineConfig pipeline_for(const Problem& p, EstimatorKind e,
                            const std::vector<std::vector<std::vector<double>>>& cv_expect);

// Control variates whose exact expectations the estimator uses, in pipeline order.
std::vector<const Model*> exact_expectation_models(const Problem& p, EstimatorKind e);

// All estimators of cfg over cfg.repeats repetitions (seeds seed+1 .. seed+repeats),
// errors averaged over repetitions. Model evaluations are shared between the
// estimators of one repetition.
ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_test1(ExperimentConfig cfg);
ExperimentResult run_test2(ExperimentConfig cfg);
ExperimentResult run_test3(ExperimentConfig cfg);

// Relative L2 error of each quantity block.
std::vector<std::pair<std::string, double>> quantity_errors(const Layout& l, const std::vector<double>& est,
                                                            const std::vector<double>& ref);

void write_csv(const std::vector<ErrorRecord>& records, const std::string& path);
std::vector<ErrorRecord> read_csv(const std::string& path);

// Throws CliError on bad input; returns false when only help was printed.
struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
bool parse_cli(int argc, const char* const* argv, ExperimentConfig& cfg);

}  // namespace mscv
