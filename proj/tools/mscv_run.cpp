#include <cstdio>
#include <iostream>

#include "mscv/experiments.hpp"

int main(int argc, char** argv) {
    mscv::ExperimentConfig cfg;
    try {
        if (!mscv::parse_cli(argc, argv, cfg)) return 0;
    } catch (const mscv::CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        const auto res = mscv::run_experiment(cfg);
        if (!cfg.out.empty()) mscv::write_csv(res.records, cfg.out);
        for (const auto& c : res.costs)
            std::printf("%-7s analytic cost per repetition %.6g, wall %.3f s\n", c.estimator.c_str(), c.analytic,
                        c.wall_seconds);
        if (cfg.out.empty()) {
            std::printf("time,estimator,quantity,error,cost\n");
            for (const auto& r : res.records)
                std::printf("%.17g,%s,%s,%.17g,%.17g\n", r.time, r.estimator.c_str(), r.quantity.c_str(), r.error, r.cost);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
