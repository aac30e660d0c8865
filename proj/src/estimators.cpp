#include "mscv/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mscv/log.hpp"
#include "mscv/random_inputs.hpp"

namespace mscv {

std::vector<double> WeightField::component(int h) const {
    std::vector<double> c(n_points);
    for (std::size_t p = 0; p < n_points; ++p) c[p] = w[p * L + h];
    return c;
}

namespace {

WeightField make_weights(int L, std::size_t n, Granularity g = Granularity::per_point) {
    WeightField wf;
    wf.L = L;
    wf.n_points = n;
    wf.w.assign(n * L, 0.0);
    wf.degenerate.assign(n, 0);
    wf.granularity = g;
    return wf;
}

void check_weights(const WeightField& w, int L, std::size_t n) {
    if (w.L != L || w.n_points != n) throw std::invalid_argument("weight field does not match the control variates");
}

}  // namespace

WeightField optimal_lambda_single(const SampleEnsemble& f, const SampleEnsemble& g) {
    check_paired(f, g);
    const auto cov = sample_covariance(f, g);
    const auto var = sample_variance(g);
    const auto scale = field_scale(g);
    WeightField wf = make_weights(1, cov.size());
    for (std::size_t p = 0; p < cov.size(); ++p) {
        if (var[p] > variance_floor(scale, p))
            wf.w[p] = cov[p] / var[p];
        else
            wf.degenerate[p] = 1;
    }
    return wf;
}

EstimatorOutput cv_estimate_single(const SampleEnsemble& f, const SampleEnsemble& g, const std::vector<double>& g_expect,
                                   const WeightField& lambda) {
    return cv_estimate_multi(f, {g}, {g_expect}, lambda);
}

MultiWeights optimal_lambda_multi(const SampleEnsemble& f, const std::vector<SampleEnsemble>& cvs) {
    const int L = static_cast<int>(cvs.size());
    if (L < 1) throw std::invalid_argument("no control variates");
    for (const auto& c : cvs) check_paired(f, c);
    const std::size_t n = f.field_size();
    CovarianceSystem sys;
    sys.L = L;
    sys.n_points = n;
    sys.C.assign(n * L * L, 0.0);
    sys.b.assign(n * L, 0.0);
    std::vector<double> scale;
    for (int i = 0; i < L; ++i) {
        merge_scale(scale, field_scale(cvs[i]));
        const auto bi = sample_covariance(f, cvs[i]);
        for (std::size_t p = 0; p < n; ++p) sys.b[p * L + i] = bi[p];
        for (int j = i; j < L; ++j) {
            const auto cij = sample_covariance(cvs[i], cvs[j]);
            for (std::size_t p = 0; p < n; ++p) {
                sys.C[p * L * L + i * L + j] = cij[p];
                sys.C[p * L * L + j * L + i] = cij[p];
            }
        }
    }
    sys.field_scale = scale;
    CovSolve sol = solve_cov_system(sys);
    MultiWeights out;
    out.weights = make_weights(L, n);
    out.weights.w = sol.weights;
    out.weights.degenerate = sol.record.degenerate;
    out.record = sol.record;
    const auto vf = sample_variance(f);
    out.residual_variance.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        double bl = 0;
        for (int i = 0; i < L; ++i) bl += sys.b[p * L + i] * sol.weights[p * L + i];
        out.residual_variance[p] = vf[p] - bl;
    }
    return out;
}

EstimatorOutput cv_estimate_multi(const SampleEnsemble& f, const std::vector<SampleEnsemble>& cvs,
                                  const std::vector<std::vector<double>>& expects, const WeightField& lambda) {
    const int L = static_cast<int>(cvs.size());
    const std::size_t n = f.field_size();
    if (static_cast<int>(expects.size()) != L) throw std::invalid_argument("one expectation per control variate required");
    for (int h = 0; h < L; ++h) {
        check_paired(f, cvs[h]);
        if (expects[h].size() != n) throw std::invalid_argument("grid mismatch");
    }
    check_weights(lambda, L, n);
    EstimatorOutput out;
    out.mean = mc_mean(f);
    for (int h = 0; h < L; ++h) {
        const auto mh = mc_mean(cvs[h]);
        for (std::size_t p = 0; p < n; ++p) out.mean[p] -= lambda.w[p * L + h] * (mh[p] - expects[h][p]);
    }
    out.weights = lambda;
    out.sample_counts = {f.size()};
    if (f.size() >= 2) {
        // controlled variable f - sum lambda_h f_h, member by member
        SampleEnsemble c;
        c.z = f.z;
        c.members = f.members;
        for (std::size_t s = 0; s < f.size(); ++s)
            for (int h = 0; h < L; ++h)
                for (std::size_t p = 0; p < n; ++p) c.members[s][p] -= lambda.w[p * L + h] * cvs[h].members[s][p];
        out.variance = sample_variance(c);
    }
    return out;
}

Orthogonalized gram_schmidt_cv(const std::vector<SampleEnsemble>& cvs) {
    const int L = static_cast<int>(cvs.size());
    if (L < 1) throw std::invalid_argument("no control variates");
    for (const auto& c : cvs) check_paired(cvs.front(), c);
    const std::size_t n = cvs.front().field_size();
    const std::size_t M = cvs.front().size();
    Orthogonalized o;
    o.L = L;
    o.n_points = n;
    o.coef.assign(n * L * L, 0.0);
    o.dropped.assign(n * L, 0);
    o.g = cvs;
    std::vector<double> scale;
    for (const auto& c : cvs) merge_scale(scale, field_scale(c));
    std::vector<std::vector<double>> var_g(L);
    for (int h = 0; h < L; ++h) {
        const auto var_f = sample_variance(cvs[h]);
        for (int j = 0; j < h; ++j) {
            const auto cov = sample_covariance(o.g[j], cvs[h]);
            for (std::size_t p = 0; p < n; ++p) {
                if (o.dropped[p * L + j]) continue;
                const double c = cov[p] / var_g[j][p];
                o.coef[p * L * L + h * L + j] = c;
                for (std::size_t s = 0; s < M; ++s) o.g[h].members[s][p] -= c * o.g[j].members[s][p];
            }
        }
        var_g[h] = sample_variance(o.g[h]);
        for (std::size_t p = 0; p < n; ++p) {
            if (var_g[h][p] <= variance_floor(scale, p) || var_g[h][p] <= 1e-12 * var_f[p]) {
                o.dropped[p * L + h] = 1;
                for (std::size_t s = 0; s < M; ++s) o.g[h].members[s][p] = 0.0;
            }
        }
    }
    return o;
}

std::vector<std::vector<double>> transform_expectations(const Orthogonalized& o,
                                                        const std::vector<std::vector<double>>& expects) {
    const int L = o.L;
    if (static_cast<int>(expects.size()) != L) throw std::invalid_argument("one expectation per control variate required");
    std::vector<std::vector<double>> eg(L, std::vector<double>(o.n_points, 0.0));
    for (int h = 0; h < L; ++h)
        for (std::size_t p = 0; p < o.n_points; ++p) {
            if (o.dropped[p * L + h]) continue;
            double v = expects[h][p];
            for (int j = 0; j < h; ++j) v -= o.coef[p * L * L + h * L + j] * eg[j][p];
            eg[h][p] = v;
        }
    return eg;
}

EstimatorOutput cv_estimate_orthogonal(const SampleEnsemble& f, const std::vector<SampleEnsemble>& g,
                                       const std::vector<std::vector<double>>& g_expects) {
    const int L = static_cast<int>(g.size());
    const std::size_t n = f.field_size();
    WeightField gamma = make_weights(L, n);
    std::vector<double> scale;
    for (const auto& c : g) merge_scale(scale, field_scale(c));
    for (int h = 0; h < L; ++h) {
        check_paired(f, g[h]);
        const auto cov = sample_covariance(f, g[h]);
        const auto var = sample_variance(g[h]);
        for (std::size_t p = 0; p < n; ++p) {
            if (var[p] > variance_floor(scale, p))
                gamma.w[p * L + h] = cov[p] / var[p];
            else
                gamma.degenerate[p] = 1;
        }
    }
    return cv_estimate_multi(f, g, g_expects, gamma);
}

WeightField two_cv_closed_form(const SampleEnsemble& f, const SampleEnsemble& f0, const SampleEnsemble& finf) {
    check_paired(f, f0);
    check_paired(f, finf);
    const std::size_t n = f.field_size();
    const auto v0 = sample_variance(f0), vi = sample_variance(finf), c0i = sample_covariance(f0, finf);
    const auto b0 = sample_covariance(f, f0), bi = sample_covariance(f, finf);
    WeightField wf = make_weights(2, n);
    std::vector<double> scale = field_scale(f0);
    merge_scale(scale, field_scale(finf));
    std::vector<std::size_t> fallback;
    for (std::size_t p = 0; p < n; ++p) {
        const double delta = v0[p] * vi[p] - c0i[p] * c0i[p];
        const double floor = variance_floor(scale, p);
        if (v0[p] > floor && vi[p] > floor && delta > 1e-12 * v0[p] * vi[p]) {
            wf.w[2 * p] = (vi[p] * b0[p] - c0i[p] * bi[p]) / delta;
            wf.w[2 * p + 1] = (v0[p] * bi[p] - c0i[p] * b0[p]) / delta;
        } else {
            fallback.push_back(p);
        }
    }
    if (!fallback.empty()) {
        CovarianceSystem sys;
        sys.L = 2;
        sys.n_points = fallback.size();
        for (std::size_t p : fallback) {
            sys.field_scale.push_back(scale[p]);
            sys.C.insert(sys.C.end(), {v0[p], c0i[p], c0i[p], vi[p]});
            sys.b.insert(sys.b.end(), {b0[p], bi[p]});
        }
        CovSolve sol = solve_cov_system(sys);
        for (std::size_t q = 0; q < fallback.size(); ++q) {
            const std::size_t p = fallback[q];
            wf.w[2 * p] = sol.weights[2 * q];
            wf.w[2 * p + 1] = sol.weights[2 * q + 1];
            wf.degenerate[p] = 1;
        }
    }
    return wf;
}

WeightField recursive_factors_quasi(const ChainStats& s) {
    const int L = s.L();
    if (L < 1 || static_cast<int>(s.cov_up.size()) != L) throw std::invalid_argument("incomplete chain statistics");
    const std::size_t n = s.n_points();
    WeightField wf = make_weights(L, n);
    for (int h = 0; h < L; ++h)
        for (std::size_t p = 0; p < n; ++p) {
            if (s.var[h][p] > variance_floor(s.field_scale, p))
                wf.w[p * L + h] = s.cov_up[h][p] / s.var[h][p];
            else
                wf.degenerate[p] = 1;
        }
    return wf;
}

WeightField recursive_weights_quasi(const ChainStats& s) {
    WeightField wf = recursive_factors_quasi(s);
    const int L = wf.L;
    for (std::size_t p = 0; p < wf.n_points; ++p) {
        double prod = 1.0;
        for (int h = L - 1; h >= 0; --h) {
            prod *= wf.w[p * L + h];
            wf.w[p * L + h] = prod;
        }
    }
    return wf;
}

WeightField recursive_weights_optimal(const ChainStats& s, const std::vector<std::size_t>& counts) {
    const int L = s.L();
    if (static_cast<int>(counts.size()) != L + 1) throw std::invalid_argument("need sample counts M_0..M_L");
    const std::size_t n = s.n_points();
    WeightField quasi = recursive_weights_quasi(s);
    WeightField wf = make_weights(L, n);
    std::vector<double> mu(L);
    for (int h = 1; h <= L; ++h)
        mu[h - 1] = static_cast<double>(counts[h]) / static_cast<double>(counts[h - 1] + counts[h]);
    std::vector<double> diag(L), sub(L - 1), sup(L - 1), rhs(L);
    std::size_t n_fallback = 0;
    for (std::size_t p = 0; p < n; ++p) {
        bool ok = true;
        for (int h = 0; h < L; ++h) ok = ok && s.var[h][p] > variance_floor(s.field_scale, p);
        if (ok) {
            for (int h = 0; h < L; ++h) {
                diag[h] = s.var[h][p];
                if (h > 0) sub[h - 1] = -mu[h] * s.cov_up[h - 1][p];
                if (h < L - 1) sup[h] = -(1.0 - mu[h]) * s.cov_up[h][p];
                rhs[h] = 0.0;
            }
            rhs[L - 1] = (1.0 - mu[L - 1]) * s.cov_up[L - 1][p];
            try {
                const auto x = solve_tridiagonal(diag, sub, sup, rhs);
                for (int h = 0; h < L; ++h) wf.w[p * L + h] = x[h];
            } catch (const std::runtime_error&) {
                ok = false;
            }
        }
        if (!ok) {
            for (int h = 0; h < L; ++h) wf.w[p * L + h] = quasi.w[p * L + h];
            wf.degenerate[p] = 1;
            ++n_fallback;
        }
    }
    if (n_fallback > 0 && n_fallback < n) {
        std::ostringstream os;
        os << "optimal recursive weights: " << n_fallback << " singular points use quasi-optimal weights";
        warn(os.str());
    }
    return wf;
}

EstimatorOutput recursive_estimate(const HierarchyMeans& m, const WeightField& lambda) {
    const int L = static_cast<int>(m.own.size());
    const std::size_t n = m.f_top.size();
    if (static_cast<int>(m.coarser.size()) != L) throw std::invalid_argument("missing level evaluations");
    for (int h = 0; h < L; ++h)
        if (m.own[h].size() != n || m.coarser[h].size() != n) throw std::invalid_argument("missing level evaluations");
    check_weights(lambda, L, n);
    EstimatorOutput out;
    out.mean = m.f_top;
    for (int h = 0; h < L; ++h)
        for (std::size_t p = 0; p < n; ++p) out.mean[p] -= lambda.w[p * L + h] * (m.own[h][p] - m.coarser[h][p]);
    out.weights = lambda;
    out.sample_counts = m.counts;
    return out;
}

WeightField unit_weights(int L, std::size_t n_points) {
    WeightField wf = make_weights(L, n_points);
    std::fill(wf.w.begin(), wf.w.end(), 1.0);
    return wf;
}

WeightField zero_weights(int L, std::size_t n_points) { return make_weights(L, n_points); }

EstimatorOutput mlmc_estimate(const HierarchyMeans& m) {
    return recursive_estimate(m, unit_weights(static_cast<int>(m.own.size()), m.f_top.size()));
}

WeightField me_correction(const WeightField& lambda, std::size_t M, std::size_t M_cv) {
    if (M < 1 || M_cv < 1) throw std::invalid_argument("sample counts must be positive");
    WeightField out = lambda;
    const double c = static_cast<double>(M_cv) / static_cast<double>(M + M_cv);
    for (double& v : out.w) v *= c;
    return out;
}

WeightField moment_lambda(const SampleEnsemble& f_moment, const SampleEnsemble& cv_moment) {
    WeightField wf = optimal_lambda_single(f_moment, cv_moment);
    wf.granularity = Granularity::per_moment_cell;
    return wf;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kTagTruth = 100;
constexpr std::uint32_t kTagCv = 101;
constexpr std::uint32_t kTagLevel = 200;

std::vector<double> draw(const PipelineConfig& cfg, std::uint32_t tag, std::size_t count) {
    return draw_uniform({cfg.seed, stream_label(tag, cfg.repetition)}, count).values;
}

std::vector<std::vector<double>> run_model(const Model& m, double z, std::size_t n_times, const char* stage) {
    std::vector<std::vector<double>> out;
    try {
        out = m(z);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(stage) + ": " + e.what());
    }
    if (out.size() != n_times) throw std::runtime_error(std::string(stage) + ": model returned wrong number of times");
    return out;
}

double cv_cost(const PipelineConfig& cfg, std::size_t h) { return h < cfg.cv_costs.size() ? cfg.cv_costs[h] : 1.0; }

// Per time: one ensemble per model, all on the same z.
std::vector<std::vector<SampleEnsemble>> evaluate_paired(const std::vector<const Model*>& models,
                                                         const std::vector<double>& z, std::size_t n_times,
                                                         const char* stage) {
    std::vector<std::vector<SampleEnsemble>> ens(n_times, std::vector<SampleEnsemble>(models.size()));
    for (auto& per_t : ens)
        for (auto& e : per_t) {
            e.z = z;
            e.members.reserve(z.size());
        }
    for (double zk : z)
        for (std::size_t m = 0; m < models.size(); ++m) {
            auto traj = run_model(*models[m], zk, n_times, stage);
            for (std::size_t t = 0; t < n_times; ++t) ens[t][m].members.push_back(std::move(traj[t]));
        }
    return ens;
}

std::vector<EstimatorOutput> pipeline_3_2(const PipelineConfig& cfg) {
    const std::size_t L = cfg.cv_models.size();
    if (cfg.cv_expectations.size() != L) throw std::invalid_argument("alg_3_2 needs one expectation trajectory per control variate");
    std::vector<const Model*> models{&cfg.truth};
    for (const auto& m : cfg.cv_models) models.push_back(&m);
    const auto z = draw(cfg, kTagTruth, cfg.M);
    auto ens = evaluate_paired(models, z, cfg.n_times, "solving");
    std::vector<EstimatorOutput> outs;
    for (std::size_t t = 0; t < cfg.n_times; ++t) {
        const SampleEnsemble& f = ens[t][0];
        std::vector<SampleEnsemble> cvs(ens[t].begin() + 1, ens[t].end());
        std::vector<std::vector<double>> ex;
        for (std::size_t h = 0; h < L; ++h) {
            if (cfg.cv_expectations[h].size() != cfg.n_times) throw std::invalid_argument("expectation trajectory length");
            ex.push_back(cfg.cv_expectations[h][t]);
        }
        WeightField w;
        const WeightMode mode = L == 0 ? WeightMode::zero : cfg.weights;
        switch (mode) {
            case WeightMode::optimal:
                w = optimal_lambda_multi(f, cvs).weights;
                break;
            case WeightMode::unit:
                w = unit_weights(static_cast<int>(L), f.field_size());
                break;
            case WeightMode::zero:
                w = zero_weights(static_cast<int>(L), f.field_size());
                break;
            case WeightMode::quasi:
                throw std::invalid_argument("quasi-optimal weights apply to the recursive estimator only");
        }
        outs.push_back(cv_estimate_multi(f, cvs, ex, w));
        outs.back().sample_counts = {cfg.M};
    }
    return outs;
}

std::vector<EstimatorOutput> pipeline_3_8(const PipelineConfig& cfg) {
    const std::size_t L = cfg.cv_models.size();
    if (L < 1) throw std::invalid_argument("alg_3_8 needs at least one control variate");
    // sampling
    const auto zM = draw(cfg, kTagTruth, cfg.M);
    const auto zE = draw(cfg, kTagCv, cfg.M_cv);
    // solving: control variates on M_cv (streamed), full model and control variates on M
    std::vector<RunningMoments> acc;
    for (const double z : zE) {
        std::vector<std::vector<std::vector<double>>> traj;
        for (const auto& m : cfg.cv_models) traj.push_back(run_model(m, z, cfg.n_times, "solving"));
        if (acc.empty())
            for (std::size_t t = 0; t < cfg.n_times; ++t) acc.emplace_back(static_cast<int>(L), traj[0][t].size());
        for (std::size_t t = 0; t < cfg.n_times; ++t) {
            std::vector<const double*> vars;
            for (std::size_t h = 0; h < L; ++h) vars.push_back(traj[h][t].data());
            acc[t].add(vars);
        }
    }
    std::vector<const Model*> models{&cfg.truth};
    for (const auto& m : cfg.cv_models) models.push_back(&m);
    auto ens = evaluate_paired(models, zM, cfg.n_times, "solving");
    // estimating
    std::vector<EstimatorOutput> outs;
    for (std::size_t t = 0; t < cfg.n_times; ++t) {
        const SampleEnsemble& f = ens[t][0];
        std::vector<SampleEnsemble> cvs(ens[t].begin() + 1, ens[t].end());
        const std::size_t n = f.field_size();
        std::vector<std::vector<double>> ex;
        for (std::size_t h = 0; h < L; ++h) ex.push_back(acc[t].mean(static_cast<int>(h)));
        WeightField w;
        if (cfg.weights == WeightMode::optimal) {
            CovarianceSystem sys;
            sys.L = static_cast<int>(L);
            sys.n_points = n;
            sys.C.assign(n * L * L, 0.0);
            sys.b.assign(n * L, 0.0);
            std::vector<double> scale;
            for (std::size_t i = 0; i < L; ++i) {
                merge_scale(scale, field_scale(cvs[i]));
                const auto bi = sample_covariance(f, cvs[i]);
                for (std::size_t p = 0; p < n; ++p) sys.b[p * L + i] = bi[p];
                for (std::size_t j = 0; j < L; ++j) {
                    const auto cij = acc[t].covariance(static_cast<int>(i), static_cast<int>(j));
                    for (std::size_t p = 0; p < n; ++p) sys.C[p * L * L + i * L + j] = cij[p];
                }
            }
            sys.field_scale = scale;
            CovSolve sol = solve_cov_system(sys);
            w = zero_weights(static_cast<int>(L), n);
            w.w = sol.weights;
            w.degenerate = sol.record.degenerate;
            if (cfg.me_correction) w = me_correction(w, cfg.M, cfg.M_cv);
        } else if (cfg.weights == WeightMode::unit) {
            w = unit_weights(static_cast<int>(L), n);
        } else if (cfg.weights == WeightMode::zero) {
            w = zero_weights(static_cast<int>(L), n);
        } else {
            throw std::invalid_argument("quasi-optimal weights apply to the recursive estimator only");
        }
        outs.push_back(cv_estimate_multi(f, cvs, ex, w));
        outs.back().sample_counts = {cfg.M, cfg.M_cv};
    }
    return outs;
}

std::vector<EstimatorOutput> pipeline_3_6(const PipelineConfig& cfg) {
    const int L = static_cast<int>(cfg.cv_models.size());
    if (L < 1) throw std::invalid_argument("alg_3_6 needs at least one control variate");
    if (static_cast<int>(cfg.counts.size()) != L + 1) throw std::invalid_argument("alg_3_6 needs sample counts M_0..M_L");
    for (int h = 1; h <= L; ++h)
        if (cfg.counts[h] >= cfg.counts[h - 1]) throw std::invalid_argument("sample counts must decrease along the hierarchy");
    auto model = [&](int h) -> const Model& { return h == L + 1 ? cfg.truth : cfg.cv_models[h - 1]; };

    const std::size_t T = cfg.n_times;
    std::vector<std::vector<std::vector<double>>> own(L, std::vector<std::vector<double>>(T));
    std::vector<std::vector<std::vector<double>>> coarser(L, std::vector<std::vector<double>>(T));
    std::vector<std::vector<double>> top(T);
    std::vector<ChainStats> stats(T);
    for (auto& s : stats) {
        s.var.resize(L);
        s.cov_up.resize(L);
    }
    // level 0: f_1 on M_0 samples; level h >= 1: f_h and f_{h+1} on M_h samples.
    // The two finest levels draw from the same streams as the alg_3_8 sets, so
    // estimators run side by side reuse each other's evaluations.
    for (int lev = 0; lev <= L; ++lev) {
        const std::uint32_t tag = lev == L ? kTagTruth : lev == L - 1 ? kTagCv : kTagLevel + lev;
        const auto z = draw(cfg, tag, cfg.counts[lev]);
        const int nv = lev == 0 ? 1 : 2;
        std::vector<RunningMoments> acc;
        for (double zk : z) {
            std::vector<std::vector<std::vector<double>>> traj;
            if (lev == 0) {
                traj.push_back(run_model(model(1), zk, T, "solving"));
            } else {
                traj.push_back(run_model(model(lev), zk, T, "solving"));
                traj.push_back(run_model(model(lev + 1), zk, T, "solving"));
            }
            if (acc.empty())
                for (std::size_t t = 0; t < T; ++t) acc.emplace_back(nv, traj[0][t].size());
            for (std::size_t t = 0; t < T; ++t) {
                std::vector<const double*> vars;
                auto& sc = stats[t].field_scale;
                for (auto& tr : traj) {
                    vars.push_back(tr[t].data());
                    if (sc.empty()) sc.assign(tr[t].size(), 0.0);
                    for (std::size_t p = 0; p < sc.size(); ++p) sc[p] = std::max(sc[p], std::abs(tr[t][p]));
                }
                acc[t].add(vars);
            }
        }
        for (std::size_t t = 0; t < T; ++t) {
            if (lev == 0) {
                coarser[0][t] = acc[t].mean(0);
                continue;
            }
            own[lev - 1][t] = acc[t].mean(0);
            if (lev < L)
                coarser[lev][t] = acc[t].mean(1);
            else
                top[t] = acc[t].mean(1);
            stats[t].var[lev - 1] = acc[t].covariance(0, 0);
            stats[t].cov_up[lev - 1] = acc[t].covariance(1, 0);
        }
    }
    std::vector<EstimatorOutput> outs;
    for (std::size_t t = 0; t < T; ++t) {
        HierarchyMeans hm;
        hm.f_top = top[t];
        hm.counts = cfg.counts;
        for (int h = 0; h < L; ++h) {
            hm.own.push_back(own[h][t]);
            hm.coarser.push_back(coarser[h][t]);
        }
        WeightField w;
        switch (cfg.weights) {
            case WeightMode::quasi:
                w = recursive_weights_quasi(stats[t]);
                break;
            case WeightMode::optimal:
                w = recursive_weights_optimal(stats[t], cfg.counts);
                break;
            case WeightMode::unit:
                w = unit_weights(L, top[t].size());
                break;
            case WeightMode::zero:
                w = zero_weights(L, top[t].size());
                break;
        }
        outs.push_back(recursive_estimate(hm, w));
    }
    return outs;
}

}  // namespace

std::vector<EstimatorOutput> run_pipeline(const PipelineConfig& cfg) {
    if (!cfg.truth) throw std::invalid_argument("pipeline needs a full model");
    if (cfg.n_times < 1) throw std::invalid_argument("pipeline needs at least one output time");
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<EstimatorOutput> outs;
    double cost = 0;
    switch (cfg.algorithm) {
        case Algorithm::alg_3_2:
            if (cfg.M < 1) throw std::invalid_argument("sample count must be positive");
            outs = pipeline_3_2(cfg);
            cost = cfg.M * cfg.truth_cost;
            for (std::size_t h = 0; h < cfg.cv_models.size(); ++h) cost += cfg.M * cv_cost(cfg, h);
            break;
        case Algorithm::alg_3_8:
            if (cfg.M < 1 || cfg.M_cv < 1) throw std::invalid_argument("sample count must be positive");
            outs = pipeline_3_8(cfg);
            cost = cfg.M * cfg.truth_cost;
            for (std::size_t h = 0; h < cfg.cv_models.size(); ++h) cost += (cfg.M + cfg.M_cv) * cv_cost(cfg, h);
            break;
        case Algorithm::alg_3_6: {
            outs = pipeline_3_6(cfg);
            const std::size_t L = cfg.cv_models.size();
            cost = cfg.counts[L] * cfg.truth_cost;
            for (std::size_t h = 1; h <= L; ++h) cost += (cfg.counts[h - 1] + cfg.counts[h]) * cv_cost(cfg, h - 1);
            break;
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (auto& o : outs) {
        o.wall_seconds = secs;
        o.model_cost = cost;
    }
    return outs;
}

}  // namespace mscv
