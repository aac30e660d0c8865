#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mscv/experiments.hpp"
#include "mscv/random_inputs.hpp"

using namespace mscv;
namespace fs = std::filesystem;

namespace {

bool parse(std::vector<std::string> args, ExperimentConfig& cfg) {
    args.insert(args.begin(), "mscv_run");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return parse_cli(static_cast<int>(argv.size()), argv.data(), cfg);
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("mscv_tests_" + std::to_string(::getpid())) / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Test 1 with a BGK full model: exact in time, so cheap.
ExperimentConfig bgk_test1() {
    ExperimentConfig c;
    c.test = 1;
    c.model = ModelKind::bgk;
    c.nv = 32;
    c.repeats = 1;
    c.times = {0.0, 0.01, 0.05, 0.5};
    return c;
}

double max_rel(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
    double num = 0, den = 0;
    for (std::size_t t = 0; t < a.size(); ++t)
        for (std::size_t i = 0; i < a[t].size(); ++i) {
            num = std::max(num, std::abs(a[t][i] - b[t][i]));
            den = std::max(den, std::abs(b[t][i]));
        }
    return num / den;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("cli: Sod two-control-variate configuration") {
    ExperimentConfig c;
    REQUIRE(parse({"--estimator", "mscv2", "--samples", "10", "--cv-samples", "1000", "--epsilon", "5e-4", "--test", "2"}, c));
    CHECK(c.test == 2);
    REQUIRE(c.estimators.size() == 1);
    CHECK(c.estimators[0] == EstimatorKind::mscv2);
    CHECK(c.M == 10);
    CHECK(c.cv_samples == std::vector<std::size_t>{1000});
    CHECK(c.epsilon == 5e-4);
    CHECK(c.tf == 0.875);
    CHECK(c.nx == 100);
    CHECK(c.seed == 42);
    CHECK(c.times.size() == 25);
    CHECK(c.times.back() == 0.875);

    const auto p = make_problem(c);
    const auto pc = pipeline_for(p, EstimatorKind::mscv2, {});
    CHECK(pc.algorithm == Algorithm::alg_3_8);
    CHECK(pc.M == 10);
    CHECK(pc.M_cv == 1000);
    CHECK(pc.cv_models.size() == 2);
}

TEST_CASE("cli: repeatable and comma separated lists") {
    ExperimentConfig c;
    REQUIRE(parse({"--test", "2", "--estimator", "mc", "--estimator", "mscvh2,mlmc", "--samples", "10", "--cv-samples",
                   "10000", "--cv-samples", "100", "--weights", "quasi", "--nu-law", "0.125rho"},
                  c));
    CHECK(c.estimators == std::vector<EstimatorKind>{EstimatorKind::mc, EstimatorKind::mscvh2, EstimatorKind::mlmc});
    CHECK(c.cv_samples == std::vector<std::size_t>{10000, 100});
    CHECK(c.weights == WeightMode::quasi);
    CHECK(c.nu_law.value == 0.125);
    const auto p = make_problem(c);
    const auto h = pipeline_for(p, EstimatorKind::mscvh2, {});
    CHECK(h.counts == std::vector<std::size_t>{10000, 100, 10});
    CHECK(h.weights == WeightMode::quasi);
    CHECK(pipeline_for(p, EstimatorKind::mlmc, {}).weights == WeightMode::unit);
}

TEST_CASE("cli: rejected input") {
    ExperimentConfig c;
    CHECK_THROWS_AS(parse({"--bogus", "1"}, c), CliError);
    CHECK_THROWS_AS(parse({"--test", "4"}, c), CliError);
    CHECK_THROWS_AS(parse({"--estimator", "qmc"}, c), CliError);
    CHECK_THROWS_AS(parse({"--samples", "-3"}, c), CliError);
    CHECK_THROWS_WITH_AS(parse({"--test", "2", "--estimator", "mlmc", "--samples", "10"}, c),
                         doctest::Contains("conflicting flags"), CliError);
    CHECK_THROWS_WITH_AS(parse({"--test", "2", "--estimator", "mscv", "--samples", "10"}, c),
                         doctest::Contains("conflicting flags"), CliError);
    CHECK_THROWS_AS(parse({"--test", "2", "--estimator", "mscvh2", "--samples", "10", "--cv-samples", "100",
                           "--cv-samples", "1000"},
                          c),
                    CliError);
    CHECK_THROWS_AS(parse({"--config", "/nonexistent/mscv.cfg"}, c), CliError);
}

TEST_CASE("cli: config file with flag override") {
    const auto dir = scratch("config");
    const auto file = dir / "run.cfg";
    {
        std::ofstream out(file);
        out << "# Sod run\n"
               "test = 2\n"
               "estimator = mscv\n"
               "samples = 20\n"
               "cv_samples = 500\n"
               "epsilon = 1e-3\n"
               "model = bgk\n"
               "nu_law = const:3\n"
               "nx = 50   # coarse\n";
    }
    ExperimentConfig c;
    REQUIRE(parse({"--config", file.string(), "--samples", "7", "--nx", "40"}, c));
    CHECK(c.test == 2);
    CHECK(c.M == 7);
    CHECK(c.nx == 40);
    CHECK(c.epsilon == 1e-3);
    CHECK(c.cv_samples == std::vector<std::size_t>{500});
    CHECK(c.model == ModelKind::bgk);
    CHECK(c.nu_law.kind == NuLaw::Kind::constant);
    CHECK(c.nu_law.value == 3.0);

    {
        std::ofstream out(file);
        out << "test 2\n";
    }
    CHECK_THROWS_WITH_AS(parse({"--config", file.string()}, c), doctest::Contains("expected key = value"), CliError);
    fs::remove_all(dir);
}

TEST_CASE("csv: header-only and bit-exact round trip") {
    const auto dir = scratch("csv");
    write_csv({}, (dir / "empty.csv").string());
    CHECK(slurp(dir / "empty.csv") == "time,estimator,quantity,error,cost\n");
    CHECK(read_csv((dir / "empty.csv").string()).empty());

    std::vector<ErrorRecord> recs{{0.1, "mc", "density", 1.0 / 3.0, 1e5 / 7.0},
                                  {0.875, "mscvh2", "temperature", 2.220446049250313e-16, 123456789.0},
                                  {10.0, "mscv", "distribution", std::nextafter(1.0, 2.0), 0.0}};
    write_csv(recs, (dir / "r.csv").string());
    const auto back = read_csv((dir / "r.csv").string());
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(back[i].time == recs[i].time);
        CHECK(back[i].estimator == recs[i].estimator);
        CHECK(back[i].quantity == recs[i].quantity);
        CHECK(back[i].error == recs[i].error);
        CHECK(back[i].cost == recs[i].cost);
    }
    CHECK_THROWS(write_csv(recs, (dir / "missing" / "r.csv").string()));
    fs::remove_all(dir);
}

TEST_CASE("cost model") {
    CHECK(model_unit_cost(ModelKind::boltzmann, 32, 100) / model_unit_cost(ModelKind::bgk, 32, 100) ==
          doctest::Approx(100.0).epsilon(1e-14));
    CHECK(model_unit_cost(ModelKind::bgk, 64, 100) == doctest::Approx(4 * model_unit_cost(ModelKind::bgk, 32, 100)));
    CHECK(1e4 * model_unit_cost(ModelKind::euler, 32, 100) == doctest::Approx(1e4 * 100));

    // Euler-only hierarchy level of M0 samples costs M0 C2 Nx
    ExperimentConfig c;
    c.test = 2;
    c.nx = 20;
    c.nv = 8;
    c.tf = 0.01;
    c.model = ModelKind::euler;
    c.M = 30;
    c.repeats = 1;
    const auto p = make_problem(c);
    auto pc = pipeline_for(p, EstimatorKind::mc, {});
    const auto out = run_pipeline(pc);
    CHECK(out.front().model_cost == doctest::Approx(30 * 20));
}

TEST_CASE("reference: mass, order doubling and disk cache") {
    auto c = bgk_test1();
    c.quadrature_order = 32;
    const auto p = make_problem(c);
    const auto ref = reference_solution(p);
    REQUIRE(ref.size() == 4);
    // rectangle-rule aliasing of the sigma = 0.5 bumps at dv = 0.5 is ~3e-9 relative
    for (const auto& r : ref) CHECK(std::abs(r[p.layout.rho_off] - 0.0625) < 1e-9);

    auto c16 = c;
    c16.quadrature_order = 16;
    CHECK(max_rel(reference_solution(make_problem(c16)), ref) < 1e-10);

    // t = 0 reference is the quadrature mean of the initial datum
    const auto init = quadrature_expectation(p.initial, 32, 4);
    CHECK(ref[0] == init[0]);

    // z-independent model: the reference is the single solve
    const Model flat = [](double) { return std::vector<std::vector<double>>{{1.5, -2.0}}; };
    const auto q = quadrature_expectation(flat, 32, 1);
    CHECK(q[0][0] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(q[0][1] == doctest::Approx(-2.0).epsilon(1e-15));

    const auto dir = scratch("cache");
    auto cc = c;
    cc.cache_dir = dir.string();
    const auto pc = make_problem(cc);
    const auto first = reference_solution(pc);
    CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 1);
    // a hit must not call the model
    auto pc2 = pc;
    pc2.truth = [](double) -> std::vector<std::vector<double>> { throw std::runtime_error("cache miss"); };
    CHECK(reference_solution(pc2) == first);
    // a different configuration misses
    auto cd = cc;
    cd.nv = 34;
    const auto other = make_problem(cd);
    auto other_bad = other;
    other_bad.truth = pc2.truth;
    CHECK_THROWS(reference_solution(other_bad));
    fs::remove_all(dir);
}

TEST_CASE("reference: solver failures name the node") {
    const Model bad = [](double z) -> std::vector<std::vector<double>> {
        if (z > 0.5) throw std::runtime_error("boom");
        return {{z}};
    };
    CHECK_THROWS_WITH(quadrature_expectation(bad, 8, 1), doctest::Contains("boom"));
    CHECK_THROWS(quadrature_expectation(bad, 65, 1));
}

TEST_CASE("determinism: identical CSV bytes") {
    const auto dir = scratch("det");
    auto c = bgk_test1();
    c.estimators = {EstimatorKind::mc, EstimatorKind::mscv};
    c.M = 20;
    c.repeats = 2;
    write_csv(run_experiment(c).records, (dir / "a.csv").string());
    write_csv(run_experiment(c).records, (dir / "b.csv").string());
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    c.seed = 43;
    write_csv(run_experiment(c).records, (dir / "c.csv").string());
    CHECK(slurp(dir / "a.csv") != slurp(dir / "c.csv"));
    fs::remove_all(dir);
}

TEST_CASE("Test 1 error at t = 0 is the sampling error of the initial datum") {
    auto c = bgk_test1();
    c.model = ModelKind::boltzmann;
    c.times = {0.0};
    c.M = 100;
    const auto res = run_test1(c);

    const auto p = make_problem(c);
    const auto z = draw_uniform({c.seed + 1, stream_label(100, 0)}, c.M).values;
    std::vector<double> mean(p.layout.size(), 0.0);
    for (double zi : z) {
        const auto v = p.initial(zi)[0];
        for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i] / c.M;
    }
    const auto errs = quantity_errors(p.layout, mean, quadrature_expectation(p.initial, 32, 1)[0]);
    for (const auto& [q, e] : errs) {
        bool found = false;
        for (const auto& r : res.records)
            if (r.quantity == q) {
                found = true;
                CHECK(r.error == doctest::Approx(e).epsilon(1e-12));
            }
        CHECK(found);
    }
}

TEST_CASE("span exactness with a BGK full model") {
    auto c = bgk_test1();
    c.truth_nu_law = c.nu_law;
    c.estimators = {EstimatorKind::mscv, EstimatorKind::mscv2};
    c.M = 10;
    for (const auto& r : run_test1(c).records) CHECK(r.error < 1e-8);

    c.truth_nu_law = NuLaw{NuLaw::Kind::proportional, 0.5};
    c.estimators = {EstimatorKind::mscv2};
    for (const auto& r : run_test1(c).records) CHECK(r.error < 1e-8);
}

TEST_CASE("records cover every estimator, time and quantity") {
    auto c = bgk_test1();
    c.estimators = {EstimatorKind::mc, EstimatorKind::mscv, EstimatorKind::mscv2};
    c.M = 10;
    const auto res = run_test1(c);
    CHECK(res.records.size() == 3 * 4 * 3);
    CHECK(res.costs.size() == 3);
    for (const auto& r : res.records) {
        CHECK(r.error >= 0);
        CHECK(r.cost > 0);
    }
}

TEST_CASE("Sod estimators produce finite errors") {
    ExperimentConfig c;
    c.test = 2;
    c.model = ModelKind::bgk;
    c.nx = 20;
    c.nv = 8;
    c.tf = 0.02;
    c.times = {0.0, 0.02};
    c.estimators = {EstimatorKind::mc, EstimatorKind::mscv, EstimatorKind::mscvh2, EstimatorKind::mlmc};
    c.M = 4;
    c.cv_samples = {40, 10};
    c.repeats = 1;
    c.quadrature_order = 4;
    const auto res = run_test2(c);
    CHECK(res.records.size() == 4 * 2 * 2);
    for (const auto& r : res.records) CHECK(std::isfinite(r.error));
    c.test = 3;
    for (const auto& r : run_test3(c).records) CHECK(std::isfinite(r.error));
}

}  // TEST_SUITE
