#include "mscv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "mscv/euler.hpp"
#include "mscv/random_inputs.hpp"

namespace mscv {

namespace {

// Bump when a solver change alters model outputs; part of the reference cache key.
constexpr const char* kSolverVersion = "solvers-3";

constexpr double kTest1Rho0 = 0.125, kTest1Sigma = 0.5, kTest1S = 0.2;
constexpr double kSodS = 0.25;
constexpr double kTest3S = 0.2, kTest3T0 = 1.0;

}  // namespace

EstimatorKind parse_estimator(const std::string& s) {
    if (s == "mc") return EstimatorKind::mc;
    if (s == "mscv") return EstimatorKind::mscv;
    if (s == "mscv2") return EstimatorKind::mscv2;
    if (s == "mscvh2") return EstimatorKind::mscvh2;
    if (s == "mlmc") return EstimatorKind::mlmc;
    throw std::invalid_argument("unknown estimator: " + s);
}

std::string estimator_name(EstimatorKind e) {
    switch (e) {
        case EstimatorKind::mc: return "mc";
        case EstimatorKind::mscv: return "mscv";
        case EstimatorKind::mscv2: return "mscv2";
        case EstimatorKind::mscvh2: return "mscvh2";
        case EstimatorKind::mlmc: return "mlmc";
    }
    return "?";
}

ModelKind parse_model(const std::string& s) {
    if (s == "boltzmann") return ModelKind::boltzmann;
    if (s == "bgk") return ModelKind::bgk;
    if (s == "euler") return ModelKind::euler;
    throw std::invalid_argument("unknown model: " + s);
}

std::string model_name(ModelKind m) {
    switch (m) {
        case ModelKind::boltzmann: return "boltzmann";
        case ModelKind::bgk: return "bgk";
        case ModelKind::euler: return "euler";
    }
    return "?";
}

namespace {

bool hierarchical(EstimatorKind e) { return e == EstimatorKind::mscvh2 || e == EstimatorKind::mlmc; }

}  // namespace

ExperimentConfig resolve(ExperimentConfig cfg) {
    if (cfg.test < 1 || cfg.test > 3) throw std::invalid_argument("test must be 1, 2 or 3");
    if (cfg.test == 1) {
        if (cfg.epsilon < 0) cfg.epsilon = 1.0 / 64.0;
        if (cfg.tf < 0) cfg.tf = 10.0;
        if (cfg.dt <= 0) cfg.dt = 0.05;
        cfg.nx = 1;
    } else {
        if (cfg.epsilon < 0) cfg.epsilon = 1e-2;
        if (cfg.tf < 0) cfg.tf = cfg.test == 2 ? 0.875 : 0.8;
    }
    if (!(cfg.epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    if (!(cfg.tf > 0)) throw std::invalid_argument("final time must be positive");
    if (cfg.dt < 0) throw std::invalid_argument("time step must be positive");
    if (cfg.nx < 1 || cfg.nv < 4 || cfg.nv % 2 != 0) throw std::invalid_argument("need nx >= 1 and even nv >= 4");
    if (!(cfg.vmax > 0)) throw std::invalid_argument("vmax must be positive");
    if (cfg.M < 1) throw std::invalid_argument("sample counts must be positive");
    if (cfg.repeats < 1) throw std::invalid_argument("repeats must be positive");
    if (cfg.estimators.empty()) throw std::invalid_argument("no estimator selected");
    for (std::size_t c : cfg.cv_samples)
        if (c < 1) throw std::invalid_argument("sample counts must be positive");
    for (EstimatorKind e : cfg.estimators) {
        if (hierarchical(e)) {
            if (cfg.cv_samples.size() != 2)
                throw std::invalid_argument("conflicting flags: --estimator " + estimator_name(e) +
                                            " needs two level counts --cv-samples M0 --cv-samples M1");
            if (!(cfg.cv_samples[0] > cfg.cv_samples[1] && cfg.cv_samples[1] > cfg.M))
                throw std::invalid_argument("hierarchical sample counts must satisfy M0 > M1 > M");
        } else if (e != EstimatorKind::mc && cfg.test != 1 && cfg.cv_samples.empty()) {
            throw std::invalid_argument("conflicting flags: --estimator " + estimator_name(e) +
                                        " needs --cv-samples for the control variate expectation");
        }
    }
    if (cfg.times.empty()) {
        for (int k = 0; k < 25; ++k) cfg.times.push_back(cfg.tf * k / 24.0);
        cfg.times.back() = cfg.tf;
    }
    for (std::size_t k = 0; k < cfg.times.size(); ++k)
        if (cfg.times[k] < 0 || (k > 0 && !(cfg.times[k] > cfg.times[k - 1])))
            throw std::invalid_argument("output times must be strictly increasing and nonnegative");
    if (cfg.quadrature_order < 1 || cfg.quadrature_order > 64) throw std::invalid_argument("unsupported quadrature order");
    return cfg;
}

DistributionField test1_initial(double z, const VelocityGrid& vg) {
    DistributionField f(vg, SpatialGrid{1, 1.0});
    const double a = 2.0 + kTest1S * z, b = 1.0 + kTest1S * z;
    const double c = kTest1Rho0 / (2.0 * std::numbers::pi);
    for (int i = 0; i < vg.n; ++i)
        for (int j = 0; j < vg.n; ++j) {
            const double v1 = vg.node(i), v2 = vg.node(j);
            const double d1 = (v1 - a) * (v1 - a) + (v2 - a) * (v2 - a);
            const double d2 = (v1 + b) * (v1 + b) + (v2 + b) * (v2 + b);
            f.values[i * vg.n + j] = c * (std::exp(-d1 / kTest1Sigma) + std::exp(-d2 / kTest1Sigma));
        }
    return f;
}

MomentVector sod_initial(double z, const SpatialGrid& xg) {
    MomentVector m;
    const int n = xg.n_cells;
    m.rho.resize(n);
    m.u1.assign(n, 0.0);
    m.u2.assign(n, 0.0);
    m.T.resize(n);
    for (int i = 0; i < n; ++i) {
        const bool left = xg.center(i) < 0.5 * xg.length;
        m.rho[i] = left ? 1.0 : 0.125;
        m.T[i] = (left ? 1.0 : 0.8) + kSodS * z;
    }
    return m;
}

double test3_wall_temperature(double z) { return 2.0 * (kTest3T0 + kTest3S * z); }

double model_unit_cost(ModelKind kind, int nv, int nx, const CostModel& c) {
    const double nv2 = static_cast<double>(nv) * nv;
    switch (kind) {
        case ModelKind::boltzmann: return c.C * c.n_angles * nv2 * std::log2(nv2) * nx;
        case ModelKind::bgk: return c.C1 * nv2 * nx;
        case ModelKind::euler: return c.C2 * nx;
    }
    return 0;
}

namespace {

using Trajectory = std::vector<std::vector<double>>;

std::vector<double> pack_homogeneous(const DistributionField& f) {
    std::vector<double> out = f.values;
    const CellMoments m = cell_moments(f.values.data(), f.vgrid);
    out.push_back(m.rho);
    out.push_back(m.T);
    return out;
}

std::vector<double> pack_moments(const MomentVector& m) {
    std::vector<double> out = m.rho;
    out.insert(out.end(), m.T.begin(), m.T.end());
    return out;
}

Trajectory constant_trajectory(std::vector<double> v, std::size_t n_times) { return Trajectory(n_times, std::move(v)); }

void make_test1(Problem& p) {
    const ExperimentConfig& c = p.cfg;
    const auto vg = p.vgrid;
    const auto times = p.times;
    const std::size_t T = times.size();
    const double eps = c.epsilon;
    p.initial = [vg, T](double z) { return constant_trajectory(pack_homogeneous(test1_initial(z, vg)), T); };
    p.equilibrium = [vg, T](double z) {
        const auto f0 = test1_initial(z, vg);
        return constant_trajectory(pack_homogeneous(maxwellian(cell_moments(f0.values.data(), vg), vg)), T);
    };
    auto bgk_model = [vg, times, eps](NuLaw law) {
        return [vg, times, eps, law](double z) {
            const auto f0 = test1_initial(z, vg);
            const double nu = law.nu(cell_moments(f0.values.data(), vg).rho) / eps;
            Trajectory out;
            for (double t : times) out.push_back(pack_homogeneous(bgk_homogeneous_exact(f0, nu, t)));
            return out;
        };
    };
    p.bgk = bgk_model(c.nu_law);
    p.bgk_alt = bgk_model(NuLaw{NuLaw::Kind::proportional, 0.125});
    switch (c.model) {
        case ModelKind::boltzmann: {
            BoltzmannConfig bc;
            bc.n_modes = c.n_modes;
            auto op = std::make_shared<BoltzmannOperator>(vg, bc);
            const double dt = c.dt;
            p.truth = [vg, times, eps, dt, op](double z) {
                const auto fields = homogeneous_solve(test1_initial(z, vg), *op, times, dt, eps);
                Trajectory out;
                for (const auto& f : fields) out.push_back(pack_homogeneous(f));
                return out;
            };
            break;
        }
        case ModelKind::bgk: p.truth = bgk_model(c.truth_nu_law); break;
        case ModelKind::euler: p.truth = p.equilibrium; break;
    }
    const int n_dist = c.nv * c.nv;
    p.layout.n_dist = n_dist;
    p.layout.rho_off = n_dist;
    p.layout.T_off = n_dist + 1;
    p.layout.n_cells = 1;
}

void make_kinetic(Problem& p) {
    const ExperimentConfig& c = p.cfg;
    const auto vg = p.vgrid;
    const auto xg = p.xgrid;
    const auto times = p.times;
    const int test = c.test;
    auto initial_moments = [xg, test](double z) {
        if (test == 2) return sod_initial(z, xg);
        MomentVector m;
        m.rho.assign(xg.n_cells, 1.0);
        m.u1.assign(xg.n_cells, 0.0);
        m.u2.assign(xg.n_cells, 0.0);
        m.T.assign(xg.n_cells, kTest3T0);
        return m;
    };
    auto boundary = [test](double z) {
        BoundarySpec bc;
        if (test == 3) {
            bc.left = BcKind::diffusive_wall;
            bc.wall_T_left = test3_wall_temperature(z);
        }
        return bc;
    };
    p.bc = boundary(0.0);
    auto kinetic_model = [=](KineticSolver solver, std::shared_ptr<BoltzmannOperator> op) {
        return [=](double z) {
            KineticSolver s = solver;
            s.op = op.get();
            const auto mv = kinetic_solve(maxwellian(initial_moments(z), vg, xg), s, times, boundary(z));
            Trajectory out;
            for (const auto& m : mv) out.push_back(pack_moments(m));
            return out;
        };
    };
    auto bgk_solver = [&](NuLaw law) {
        KineticSolver s;
        s.model = KineticSolver::Model::bgk;
        s.bgk = BgkConfig{law, c.epsilon};
        s.dt = c.dt;
        return s;
    };
    p.bgk = kinetic_model(bgk_solver(c.nu_law), nullptr);
    p.bgk_alt = kinetic_model(bgk_solver(NuLaw{NuLaw::Kind::proportional, 0.125}), nullptr);
    p.equilibrium = [=](double z) {
        const auto mv = euler_solve(euler_from_moments(initial_moments(z), xg), times, boundary(z));
        Trajectory out;
        for (const auto& m : mv) out.push_back(pack_moments(m));
        return out;
    };
    switch (c.model) {
        case ModelKind::boltzmann: {
            BoltzmannConfig bc;
            bc.n_modes = c.n_modes;
            auto op = std::make_shared<BoltzmannOperator>(vg, bc);
            KineticSolver s;
            s.model = KineticSolver::Model::boltzmann;
            s.epsilon = c.epsilon;
            s.dt = c.dt;
            p.truth = kinetic_model(s, op);
            break;
        }
        case ModelKind::bgk: p.truth = kinetic_model(bgk_solver(c.truth_nu_law), nullptr); break;
        case ModelKind::euler: p.truth = p.equilibrium; break;
    }
    p.layout.n_dist = 0;
    p.layout.rho_off = 0;
    p.layout.T_off = c.nx;
    p.layout.n_cells = c.nx;
}

}  // namespace

Problem make_problem(const ExperimentConfig& cfg_in) {
    Problem p;
    p.cfg = resolve(cfg_in);
    const ExperimentConfig& c = p.cfg;
    p.times = c.times;
    p.vgrid = VelocityGrid{c.nv, c.vmax};
    p.xgrid = SpatialGrid{c.nx, 1.0};
    if (c.test == 1)
        make_test1(p);
    else
        make_kinetic(p);
    p.cost_truth = model_unit_cost(c.model, c.nv, c.nx);
    p.cost_bgk = model_unit_cost(ModelKind::bgk, c.nv, c.nx);
    p.cost_equilibrium = model_unit_cost(ModelKind::euler, c.nv, c.nx);
    return p;
}

std::vector<std::vector<double>> quadrature_expectation(const Model& m, int order, std::size_t n_times) {
    const SampleSet q = gauss_legendre(order);
    std::vector<std::vector<double>> mean;
    for (std::size_t k = 0; k < q.values.size(); ++k) {
        Trajectory traj;
        try {
            traj = m(q.values[k]);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "quadrature node " << k << " (z=" << q.values[k] << "): " << e.what();
            throw std::runtime_error(os.str());
        }
        if (traj.size() != n_times) throw std::runtime_error("model returned wrong number of times");
        if (mean.empty()) {
            mean.resize(n_times);
            for (std::size_t t = 0; t < n_times; ++t) mean[t].assign(traj[t].size(), 0.0);
        }
        for (std::size_t t = 0; t < n_times; ++t)
            for (std::size_t i = 0; i < traj[t].size(); ++i) mean[t][i] += q.weights[k] * traj[t][i];
    }
    return mean;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string reference_key(const Problem& p) {
    const auto& c = p.cfg;
    std::ostringstream os;
    os.precision(17);
    os << kSolverVersion << ";test=" << c.test << ";model=" << model_name(c.model) << ";nx=" << c.nx << ";nv=" << c.nv
       << ";vmax=" << c.vmax << ";eps=" << c.epsilon << ";dt=" << c.dt << ";order=" << c.quadrature_order;
    if (c.model == ModelKind::boltzmann) os << ";modes=" << c.n_modes;
    if (c.model == ModelKind::bgk)
        os << ";nu=" << (c.truth_nu_law.kind == NuLaw::Kind::constant ? "const:" : "rho*") << c.truth_nu_law.value;
    os << ";times=";
    for (double t : p.times) os << t << ',';
    return os.str();
}

bool load_reference(const std::filesystem::path& file, const std::string& key,
                    std::vector<std::vector<double>>& out) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return false;
    char magic[8];
    std::uint64_t klen = 0, nt = 0, n = 0;
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != "MSCVREF1") return false;
    in.read(reinterpret_cast<char*>(&klen), 8);
    std::string k(klen, '\0');
    in.read(k.data(), static_cast<std::streamsize>(klen));
    if (!in || k != key) return false;
    in.read(reinterpret_cast<char*>(&nt), 8);
    in.read(reinterpret_cast<char*>(&n), 8);
    out.assign(nt, std::vector<double>(n));
    for (auto& v : out) in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    return static_cast<bool>(in);
}

void store_reference(const std::filesystem::path& file, const std::string& key,
                     const std::vector<std::vector<double>>& ref) {
    std::filesystem::create_directories(file.parent_path());
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write reference cache: " + tmp);
        const std::uint64_t klen = key.size(), nt = ref.size(), n = ref.empty() ? 0 : ref.front().size();
        out.write("MSCVREF1", 8);
        out.write(reinterpret_cast<const char*>(&klen), 8);
        out.write(key.data(), static_cast<std::streamsize>(klen));
        out.write(reinterpret_cast<const char*>(&nt), 8);
        out.write(reinterpret_cast<const char*>(&n), 8);
        for (const auto& v : ref) out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
        if (!out) throw std::runtime_error("cannot write reference cache: " + tmp);
    }
    std::filesystem::rename(tmp, file);
}

}  // namespace

std::vector<std::vector<double>> reference_solution(const Problem& p) {
    const std::string key = reference_key(p);
    std::filesystem::path file;
    if (!p.cfg.cache_dir.empty()) {
        char name[40];
        std::snprintf(name, sizeof name, "ref_%016llx.bin", static_cast<unsigned long long>(fnv1a(key)));
        file = std::filesystem::path(p.cfg.cache_dir) / name;
        std::vector<std::vector<double>> cached;
        if (load_reference(file, key, cached)) return cached;
    }
    auto ref = quadrature_expectation(p.truth, p.cfg.quadrature_order, p.times.size());
    if (!file.empty()) store_reference(file, key, ref);
    return ref;
}

std::vector<const Model*> exact_expectation_models(const Problem& p, EstimatorKind e) {
    if (p.cfg.test != 1) return {};
    if (e == EstimatorKind::mscv) return {&p.bgk};
    if (e == EstimatorKind::mscv2) return {&p.initial, &p.equilibrium};
    return {};
}

PipelineConfig pipeline_for(const Problem& p, EstimatorKind e,
                            const std::vector<std::vector<std::vector<double>>>& cv_expect) {
    const ExperimentConfig& c = p.cfg;
    PipelineConfig pc;
    pc.n_times = p.times.size();
    pc.seed = c.seed;
    pc.truth = p.truth;
    pc.truth_cost = p.cost_truth;
    pc.M = c.M;
    pc.weights = c.weights == WeightMode::quasi ? WeightMode::optimal : c.weights;
    switch (e) {
        case EstimatorKind::mc:
            pc.algorithm = Algorithm::alg_3_2;
            break;
        case EstimatorKind::mscv:
        case EstimatorKind::mscv2:
            pc.cv_models = {p.bgk};
            pc.cv_costs = {p.cost_bgk};
            if (e == EstimatorKind::mscv2) {
                if (c.test == 1) {
                    pc.cv_models = {p.initial, p.equilibrium};
                    pc.cv_costs = {p.cost_equilibrium, p.cost_equilibrium};
                } else {
                    pc.cv_models.push_back(p.bgk_alt);
                    pc.cv_costs.push_back(p.cost_bgk);
                }
            }
            if (c.test == 1) {
                pc.algorithm = Algorithm::alg_3_2;
                if (cv_expect.size() != pc.cv_models.size()) throw std::invalid_argument("missing control variate expectations");
                pc.cv_expectations = cv_expect;
            } else {
                pc.algorithm = Algorithm::alg_3_8;
                pc.M_cv = c.cv_samples.back();
            }
            break;
        case EstimatorKind::mscvh2:
        case EstimatorKind::mlmc:
            pc.algorithm = Algorithm::alg_3_6;
            pc.cv_models = {p.equilibrium, p.bgk};
            pc.cv_costs = {p.cost_equilibrium, p.cost_bgk};
            pc.counts = {c.cv_samples[0], c.cv_samples[1], c.M};
            pc.weights = e == EstimatorKind::mlmc ? WeightMode::unit : c.weights;
            break;
    }
    return pc;
}

std::vector<std::pair<std::string, double>> quantity_errors(const Layout& l, const std::vector<double>& est,
                                                            const std::vector<double>& ref) {
    if (est.size() != l.size() || ref.size() != l.size()) throw std::invalid_argument("grid mismatch");
    auto block = [&](std::size_t off, std::size_t n) {
        double num = 0, den = 0;
        for (std::size_t i = off; i < off + n; ++i) {
            num += (est[i] - ref[i]) * (est[i] - ref[i]);
            den += ref[i] * ref[i];
        }
        if (!(den > 0)) throw std::invalid_argument("degenerate reference");
        return std::sqrt(num / den);
    };
    std::vector<std::pair<std::string, double>> out;
    if (l.n_dist > 0) out.emplace_back("distribution", block(0, l.n_dist));
    out.emplace_back("density", block(l.rho_off, l.n_cells));
    out.emplace_back("temperature", block(l.T_off, l.n_cells));
    return out;
}

namespace {

// Remembers evaluations by z so estimators sharing a repetition reuse them.
Model memoize(const Model& m) {
    auto store = std::make_shared<std::map<double, Trajectory>>();
    return [m, store](double z) {
        auto it = store->find(z);
        if (it != store->end()) return it->second;
        Trajectory t = m(z);
        store->emplace(z, t);
        return t;
    };
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    const Problem base = make_problem(cfg);
    const ExperimentConfig& c = base.cfg;
    const auto ref = reference_solution(base);
    std::map<const Model*, std::vector<std::vector<double>>> exact;
    std::vector<std::vector<std::vector<std::vector<double>>>> cv_expect(c.estimators.size());
    for (std::size_t k = 0; k < c.estimators.size(); ++k)
        for (const Model* m : exact_expectation_models(base, c.estimators[k])) {
            if (!exact.count(m)) exact[m] = quadrature_expectation(*m, c.quadrature_order, base.times.size());
            cv_expect[k].push_back(exact[m]);
        }

    const std::size_t T = base.times.size();
    const std::size_t E = c.estimators.size();
    // sums[e][t][quantity]
    std::vector<std::vector<std::vector<std::pair<std::string, double>>>> sums(E, std::vector<std::vector<std::pair<std::string, double>>>(T));
    std::vector<CostReport> costs(E);
    for (int r = 1; r <= c.repeats; ++r) {
        Problem p = base;
        if (E > 1) {
            p.truth = memoize(base.truth);
            p.bgk = memoize(base.bgk);
            p.bgk_alt = memoize(base.bgk_alt);
        }
        for (std::size_t k = 0; k < E; ++k) {
            PipelineConfig pc = pipeline_for(p, c.estimators[k], cv_expect[k]);
            pc.seed = c.seed + static_cast<std::uint64_t>(r);
            pc.repetition = 0;
            const auto outs = run_pipeline(pc);
            costs[k].estimator = estimator_name(c.estimators[k]);
            costs[k].analytic = outs.front().model_cost;
            costs[k].wall_seconds += outs.front().wall_seconds;
            for (std::size_t t = 0; t < T; ++t) {
                const auto errs = quantity_errors(p.layout, outs[t].mean, ref[t]);
                if (sums[k][t].empty()) sums[k][t] = errs;
                else
                    for (std::size_t q = 0; q < errs.size(); ++q) sums[k][t][q].second += errs[q].second;
            }
        }
    }
    ExperimentResult res;
    res.costs = costs;
    for (std::size_t k = 0; k < E; ++k)
        for (std::size_t t = 0; t < T; ++t)
            for (const auto& [q, s] : sums[k][t])
                res.records.push_back({base.times[t], costs[k].estimator, q, s / c.repeats, costs[k].analytic});
    return res;
}

ExperimentResult run_test1(ExperimentConfig cfg) {
    cfg.test = 1;
    return run_experiment(cfg);
}

ExperimentResult run_test2(ExperimentConfig cfg) {
    cfg.test = 2;
    return run_experiment(cfg);
}

ExperimentResult run_test3(ExperimentConfig cfg) {
    cfg.test = 3;
    return run_experiment(cfg);
}

void write_csv(const std::vector<ErrorRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "time,estimator,quantity,error,cost\n";
    char buf[128];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.17g", r.time);
        out << buf << ',' << r.estimator << ',' << r.quantity << ',';
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r.error, r.cost);
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<ErrorRecord> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "time,estimator,quantity,error,cost")
        throw std::runtime_error("unexpected CSV header in " + path);
    std::vector<ErrorRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f[5];
        for (auto& s : f)
            if (!std::getline(ss, s, ',')) throw std::runtime_error("malformed CSV row: " + line);
        out.push_back({std::stod(f[0]), f[1], f[2], std::stod(f[3]), std::stod(f[4])});
    }
    return out;
}

}  // namespace mscv
