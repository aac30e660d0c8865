#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mscv/experiments.hpp"

namespace mscv {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// key = value lines, '#' comments. Keys may use '_' or '-'.
std::vector<std::string> config_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError("cannot read config file: " + path);
    std::vector<std::string> args;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw CliError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        for (char& ch : key)
            if (ch == '_') ch = '-';
        if (key == "config") throw CliError(path + ":" + std::to_string(lineno) + ": nested config files are not supported");
        args.push_back("--" + key);
        args.push_back(value);
    }
    return args;
}

void parse_with(CLI::App& app, std::vector<std::string> args) {
    // CLI11 consumes the vector from the back
    std::reverse(args.begin(), args.end());
    app.parse(args);
}

}  // namespace

bool parse_cli(int argc, const char* const* argv, ExperimentConfig& cfg) {
    CLI::App app{"Control variate and multilevel estimators for uncertain kinetic equations"};
    app.set_help_flag("-h,--help", "Print this help message and exit");
    std::string config_path;
    app.add_option("--config", config_path, "key = value file; flags override its settings");

    app.add_option("--test", cfg.test, "Test case")->check(CLI::Range(1, 3));
    app.add_option_function<std::vector<std::string>>(
           "--estimator",
           [&](const std::vector<std::string>& v) {
               cfg.estimators.clear();
               for (const auto& s : v) cfg.estimators.push_back(parse_estimator(s));
           },
           "mc|mscv|mscv2|mscvh2|mlmc (repeatable)")
        ->check(CLI::IsMember({"mc", "mscv", "mscv2", "mscvh2", "mlmc"}))
        ->delimiter(',');
    app.add_option_function<std::string>(
           "--weights",
           [&](const std::string& s) {
               cfg.weights = s == "optimal" ? WeightMode::optimal : s == "quasi" ? WeightMode::quasi : WeightMode::unit;
           },
           "optimal|quasi|unit")
        ->check(CLI::IsMember({"optimal", "quasi", "unit"}));
    app.add_option("--samples", cfg.M, "M, samples of the full model")->check(CLI::PositiveNumber);
    app.add_option("--cv-samples", cfg.cv_samples, "Control variate sample counts, coarse to fine (repeatable)")
        ->check(CLI::PositiveNumber)
        ->delimiter(',');
    app.add_option("--epsilon", cfg.epsilon, "Knudsen number")->check(CLI::PositiveNumber);
    app.add_option("--nx", cfg.nx, "Spatial cells")->check(CLI::PositiveNumber);
    app.add_option("--nv", cfg.nv, "Velocity nodes per dimension")->check(CLI::PositiveNumber);
    app.add_option("--vmax", cfg.vmax, "Velocity box half-width")->check(CLI::PositiveNumber);
    app.add_option("--tf", cfg.tf, "Final time")->check(CLI::PositiveNumber);
    app.add_option("--dt", cfg.dt, "Time step (default: largest admissible)")->check(CLI::PositiveNumber);
    app.add_option_function<std::string>(
        "--nu-law", [&](const std::string& s) { cfg.nu_law = parse_nu_law(s); }, "rho|0.125rho|const:<v>");
    app.add_option_function<std::string>(
        "--model", [&](const std::string& s) { cfg.model = parse_model(s); }, "Full model: boltzmann|bgk|euler");
    app.add_option_function<std::string>(
        "--truth-nu-law", [&](const std::string& s) { cfg.truth_nu_law = parse_nu_law(s); },
        "BGK law of the full model when --model bgk (default 0.5rho)");
    app.add_option("--n-modes", cfg.n_modes, "Fourier modes per dimension of the collision operator");
    app.add_option("--quadrature-order", cfg.quadrature_order, "Gauss-Legendre nodes for reference solutions")
        ->check(CLI::Range(1, 64));
    app.add_option("--repeats", cfg.repeats, "M_a, repetitions averaged")->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "Master seed");
    app.add_option("--out", cfg.out, "Output CSV path");
    app.add_option("--cache-dir", cfg.cache_dir, "Reference solution cache directory");

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        // The config file is applied first so that flags override it.
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
            else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
        }
        if (!config_path.empty()) {
            parse_with(app, config_args(config_path));
            app.clear();
        }
        parse_with(app, args);
        cfg = resolve(cfg);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return false;
    } catch (const CLI::ParseError& e) {
        throw CliError(e.what());
    } catch (const CliError&) {
        throw;
    } catch (const std::exception& e) {
        throw CliError(e.what());
    }
    return true;
}

}  // namespace mscv
