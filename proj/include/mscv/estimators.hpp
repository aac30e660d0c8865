#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mscv/statistics.hpp"

namespace mscv {

enum class Granularity { global_scalar, per_moment_cell, per_point };

// Weights for L control variates at each point, point-major: w[p*L + h].
struct WeightField {
    int L = 1;
    std::size_t n_points = 0;
    std::vector<double> w;
    std::vector<unsigned char> degenerate;  // per point
    Granularity granularity = Granularity::per_point;

    double at(std::size_t p, int h) const { return w[p * L + h]; }
    std::vector<double> component(int h) const;
};

struct EstimatorOutput {
    std::vector<double> mean;
    WeightField weights;
    std::vector<double> variance;  // diagnostic: sample variance of the controlled variable
    std::vector<std::size_t> sample_counts;
    double wall_seconds = 0;
    double model_cost = 0;
};

WeightField optimal_lambda_single(const SampleEnsemble& f, const SampleEnsemble& g);

EstimatorOutput cv_estimate_single(const SampleEnsemble& f, const SampleEnsemble& g, const std::vector<double>& g_expect,
                                   const WeightField& lambda);

// Lambda* = C^{-1} b per point; residual_variance = Var(f) - b^T Lambda*.
struct MultiWeights {
    WeightField weights;
    std::vector<double> residual_variance;
    RegularizationRecord record;
};

MultiWeights optimal_lambda_multi(const SampleEnsemble& f, const std::vector<SampleEnsemble>& cvs);

// E_M[f] - sum_h lambda_h (E_M[f_h] - expect_h); variance = Var_M(f - sum lambda_h f_h).
EstimatorOutput cv_estimate_multi(const SampleEnsemble& f, const std::vector<SampleEnsemble>& cvs,
                                  const std::vector<std::vector<double>>& expects, const WeightField& lambda);

// g_h = f_h - sum_{j<h} c_hj g_j, c_hj = Cov(g_j, f_h)/Var(g_j), pointwise.
struct Orthogonalized {
    std::vector<SampleEnsemble> g;
    std::vector<double> coef;  // n_points * L * L, lower triangle c_hj
    std::vector<unsigned char> dropped;  // n_points * L
    int L = 0;
    std::size_t n_points = 0;
};

Orthogonalized gram_schmidt_cv(const std::vector<SampleEnsemble>& cvs);

// Expectations of the orthogonalized variables from those of the originals.
std::vector<std::vector<double>> transform_expectations(const Orthogonalized& o,
                                                        const std::vector<std::vector<double>>& expects);

// gamma_h = Cov(f,g_h)/Var(g_h) with orthogonal g.
EstimatorOutput cv_estimate_orthogonal(const SampleEnsemble& f, const std::vector<SampleEnsemble>& g,
                                       const std::vector<std::vector<double>>& g_expects);

// Explicit 2x2 weights for the control variates (f0, f_inf). Points with a
// vanishing determinant go through solve_cov_system.
WeightField two_cv_closed_form(const SampleEnsemble& f, const SampleEnsemble& f0, const SampleEnsemble& finf);

// Statistics of a control-variate chain f_1..f_L, f_{L+1} = f. For level h
// (index h-1 here) both quantities come from the level-h sample set.
struct ChainStats {
    std::vector<std::vector<double>> var;     // Var(f_h)
    std::vector<std::vector<double>> cov_up;  // Cov(f_{h+1}, f_h)
    std::vector<double> field_scale;          // per point, empty: 1

    int L() const { return static_cast<int>(var.size()); }
    std::size_t n_points() const { return var.empty() ? 0 : var.front().size(); }
};

// lambda_hat_h = Cov(f_{h+1}, f_h)/Var(f_h); returned weights are the composite
// products lambda_h = prod_{j>=h} lambda_hat_j.
WeightField recursive_weights_quasi(const ChainStats& s);
// The per-level factors lambda_hat_h themselves.
WeightField recursive_factors_quasi(const ChainStats& s);

// Tridiagonal optimality system with lambda_0 = 0, lambda_{L+1} = 1.
// counts = M_0..M_L. Singular points fall back to the quasi-optimal composites.
WeightField recursive_weights_optimal(const ChainStats& s, const std::vector<std::size_t>& counts);

// Means entering the recursive estimator: f_top = E_{M_L}[f], own[h] = E_{M_h}[f_h],
// coarser[h] = E_{M_{h-1}}[f_h] (index h-1 here).
struct HierarchyMeans {
    std::vector<double> f_top;
    std::vector<std::vector<double>> own;
    std::vector<std::vector<double>> coarser;
    std::vector<std::size_t> counts;  // M_0..M_L
};

EstimatorOutput recursive_estimate(const HierarchyMeans& m, const WeightField& lambda);

// Classical multilevel Monte Carlo: recursive estimator with unit weights.
EstimatorOutput mlmc_estimate(const HierarchyMeans& m);

WeightField unit_weights(int L, std::size_t n_points);
WeightField zero_weights(int L, std::size_t n_points);

// Scale by M_cv/(M+M_cv), M_cv = size of the control-variate-only sample set.
WeightField me_correction(const WeightField& lambda, std::size_t M, std::size_t M_cv);

// Per-cell weight for one moment: Cov(m(f), m(f_cv))/Var(m(f_cv)).
WeightField moment_lambda(const SampleEnsemble& f_moment, const SampleEnsemble& cv_moment);

// ---------------------------------------------------------------------------
// Staged pipelines (sampling -> solving -> estimating).

// A model maps one random input z to its outputs at every requested time,
// each a flattened field of fixed length.
using Model = std::function<std::vector<std::vector<double>>(double z)>;

enum class Algorithm { alg_3_2, alg_3_6, alg_3_8 };
enum class WeightMode { optimal, quasi, unit, zero };

struct PipelineConfig {
    Algorithm algorithm = Algorithm::alg_3_2;
    WeightMode weights = WeightMode::optimal;
    std::size_t n_times = 1;
    std::uint64_t seed = 42;
    std::uint32_t repetition = 0;

    // alg_3_2 / alg_3_8: truth on M samples, control variates cv_models.
    // alg_3_6: cv_models ordered f_1 (coarsest) .. f_L, counts = M_0..M_L.
    Model truth;
    std::vector<Model> cv_models;
    std::size_t M = 10;
    std::size_t M_cv = 100;
    std::vector<std::size_t> counts;

    // alg_3_2: expectations of each control variate at each time [h][t].
    std::vector<std::vector<std::vector<double>>> cv_expectations;
    bool me_correction = true;  // alg_3_8

    // Analytic cost per model evaluation, for the cost tally.
    double truth_cost = 1.0;
    std::vector<double> cv_costs;
};

std::vector<EstimatorOutput> run_pipeline(const PipelineConfig& cfg);

}  // namespace mscv
